"""Primitive form of scalar expressions and evaluation at the origin.

A primitive form is a polynomial in correlator atoms ``<<tau ... tau>>_g`` of
constant basis fields, affine in the unknowns:

    {(unknown, atoms): coefficient}

where ``unknown`` is 0 for the constant part and ``atoms`` is a sorted tuple
of ``(genus, sorted insertions)``.  Differentiating such a polynomial along a
basis direction only appends the direction to one atom at a time, which is
what makes the expand-then-differentiate route cheap.
"""
from __future__ import annotations

from bisect import insort
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Mapping

from .exactq import ONE, ZERO, fmt_q
from .expr import (Basis, Const, ContractIndex, Corr, DualField, FieldExpr, FieldSum,
                   IndexedBasis, Product, QProd, Scaled, ScalarExpr, Sum, T, TauMinus,
                   TauPlus, Unknown)
from .oracle import IrreducibleCorrelator, Oracle
from .theory import Insertion, TheorySpec, determine_degree, metric_raise

Atom = tuple  # (genus, tuple[Insertion, ...])
Monomial = tuple  # (unknown index or 0, tuple[Atom, ...])
Poly = dict  # Monomial -> Fraction

ONE_POLY: Poly = {(0, ()): ONE}


class UnboundIndex(KeyError):
    pass


class NonAffine(ValueError):
    """Two unknowns met in one monomial."""


def padd(acc: Poly, p: Mapping, scale: Fraction = ONE) -> Poly:
    for m, c in p.items():
        v = acc.get(m, ZERO) + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
    return acc


def pmul(a: Mapping, b: Mapping) -> Poly:
    out: Poly = {}
    for (u1, at1), c1 in a.items():
        for (u2, at2), c2 in b.items():
            if u1 and u2:
                raise NonAffine("product of two unknowns")
            key = (u1 or u2, tuple(sorted(at1 + at2)))
            v = out.get(key, ZERO) + c1 * c2
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


class Expander:
    """Rewrites T, quantum products and contractions down to atoms.

    Results are cached per (node, bound indices), so a single instance should
    be reused across the terms of one expression.
    """

    def __init__(self, theory: TheorySpec):
        self.theory = theory
        self._fcache: dict = {}
        self._scache: dict = {}

    # fields map Insertion -> Poly coefficient
    def field(self, f: FieldExpr, env: tuple = ()) -> dict:
        key = (f, env)
        hit = self._fcache.get(key)
        if hit is None:
            hit = self._field(f, dict(env))
            self._fcache[key] = hit
        return hit

    def _field(self, f: FieldExpr, env: dict) -> dict:
        th = self.theory
        envt = tuple(sorted(env.items()))
        if isinstance(f, Basis):
            th.check(f.ins)
            return {} if f.ins.level < 0 else {Insertion(*f.ins): ONE_POLY}
        if isinstance(f, IndexedBasis):
            if f.var not in env:
                raise UnboundIndex(f.var)
            a = env[f.var]
            if not f.raised:
                return {Insertion(0, a): ONE_POLY}
            return {Insertion(0, b): {(0, ()): c} for b, c in metric_raise(th, a)}
        if isinstance(f, (TauPlus, TauMinus)):
            step = 1 if isinstance(f, TauPlus) else -1
            inner = self.field(f.arg, envt)
            return {Insertion(i.level + step, i.cls): p for i, p in inner.items()
                    if i.level + step >= 0}
        if isinstance(f, T):
            out = _fadd({}, self.field(TauPlus(f.arg), envt))
            return _fadd(out, self.field(DualField((f.arg,)), envt), -ONE)
        if isinstance(f, QProd):
            return self.field(DualField((f.left, f.right)), envt)
        if isinstance(f, DualField):
            out: dict = {}
            for a in range(th.size):
                coeff: Poly = {}
                for b, c in metric_raise(th, a):
                    p = self._corr(0, [self.field(v, envt) for v in f.args]
                                   + [{Insertion(0, b): ONE_POLY}])
                    padd(coeff, p, c)
                if coeff:
                    out[Insertion(0, a)] = coeff
            return out
        if isinstance(f, Scaled):
            s = self.scalar(f.coeff, envt)
            if not s:
                return {}
            return {i: pmul(s, p) for i, p in self.field(f.arg, envt).items()}
        if isinstance(f, FieldSum):
            out = {}
            for t in f.terms:
                _fadd(out, self.field(t, envt))
            return out
        raise TypeError(f"not a field expression: {f!r}")

    def scalar(self, e: ScalarExpr, env: tuple = ()) -> Poly:
        key = (e, env)
        hit = self._scache.get(key)
        if hit is None:
            hit = self._scalar(e, dict(env))
            self._scache[key] = hit
        return hit

    def _scalar(self, e: ScalarExpr, env: dict) -> Poly:
        envt = tuple(sorted(env.items()))
        if isinstance(e, Const):
            return {(0, ()): Fraction(e.value)} if e.value else {}
        if isinstance(e, Unknown):
            return {(e.index, ()): ONE}
        if isinstance(e, Corr):
            return self._corr(e.genus, [self.field(v, envt) for v in e.args])
        if isinstance(e, Product):
            out = ONE_POLY
            for f in e.factors:
                out = pmul(out, self.scalar(f, envt))
                if not out:
                    break
            return out
        if isinstance(e, Sum):
            out = {}
            for t in e.terms:
                padd(out, self.scalar(t, envt))
            return out
        if isinstance(e, ContractIndex):
            out = {}
            for a in range(self.theory.size):
                inner = dict(env)
                inner[e.var] = a
                padd(out, self.scalar(e.body, tuple(sorted(inner.items()))))
            return out
        raise TypeError(f"not a scalar expression: {e!r}")

    def _corr(self, genus: int, fields: list) -> Poly:
        out: Poly = {}
        for choice in cartesian(*(f.items() for f in fields)):
            atom = (genus, tuple(sorted(i for i, _ in choice)))
            coeff = {(0, (atom,)): ONE}
            for _, p in choice:
                coeff = pmul(coeff, p)
                if not coeff:
                    break
            padd(out, coeff)
        return out


def _fadd(acc: dict, f: Mapping, scale: Fraction = ONE) -> dict:
    for i, p in f.items():
        cur = padd(dict(acc.get(i, {})), p, scale)
        if cur:
            acc[i] = cur
        else:
            acc.pop(i, None)
    return acc


def expand(e: ScalarExpr, theory: TheorySpec) -> Poly:
    """Primitive form of ``e`` over ``theory``."""
    return Expander(theory).scalar(e)


def _leibniz(poly, x):
    """Append ``x`` to each atom in turn, merging equal monomials."""
    out = {}
    for (u, atoms), c in poly.items():
        n = len(atoms)
        i = 0
        while i < n:
            atom = atoms[i]
            j = i + 1
            while j < n and atoms[j] == atom:
                j += 1
            ins = list(atom[1])
            insort(ins, x)
            rest = list(atoms[:i] + atoms[i + 1:])
            insort(rest, (atom[0], tuple(ins)))
            key = (u, tuple(rest))
            add = c if j - i == 1 else c * (j - i)
            old = out.get(key)
            if old is None:
                out[key] = add
            else:
                v = old + add
                if v:
                    out[key] = v
                else:
                    del out[key]
            i = j
    return out


def differentiate(poly: Mapping, x: Insertion) -> Poly:
    """Derivative of a primitive form along the basis direction ``x``."""
    return _leibniz(poly, Insertion(*x))


def differentiate_many(poly: Mapping, directions: Iterable) -> Poly:
    for x in directions:
        poly = differentiate(poly, x)
    return poly


# -- evaluation -------------------------------------------------------------

@dataclass
class EvalForm:
    """Affine form in the unknowns with coefficients graded by Novikov degree.

    ``terms`` maps ``(unknown, degree)`` to a rational, unknown 0 being the
    constant part.
    """

    terms: dict = field(default_factory=dict)

    def add(self, unknown: int, degree: int, value: Fraction) -> None:
        key = (unknown, degree)
        v = self.terms.get(key, ZERO) + value
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.terms})

    def constant(self, degree: int = 0) -> Fraction:
        return self.terms.get((0, degree), ZERO)

    def coefficient(self, unknown: int, degree: int = 0) -> Fraction:
        return self.terms.get((unknown, degree), ZERO)

    def restrict(self, degree: int) -> dict[int, Fraction]:
        """``{unknown: coefficient}`` of one degree, 0 keying the constant."""
        return {u: v for (u, d), v in sorted(self.terms.items()) if d == degree}

    def substitute(self, values: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Value per degree once each unknown ``i`` is set to ``values[i]``."""
        out: dict[int, Fraction] = defaultdict(Fraction)
        for (u, d), v in self.terms.items():
            out[d] += v if u == 0 else v * values.get(u, ZERO)
        return {d: v for d, v in sorted(out.items())}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, EvalForm) and self.terms == other.terms

    def to_records(self) -> list[dict]:
        out = []
        for d in self.degrees():
            part = self.restrict(d)
            out.append({
                "degree": d,
                "constant": fmt_q(part.pop(0, ZERO)),
                "unknowns": {f"a_{u}": fmt_q(v) for u, v in part.items()},
            })
        return out


def atom_degree(theory: TheorySpec, atom: Atom) -> int | None:
    return determine_degree(theory, atom[0], atom[1])


def evaluate_at_origin(poly: Mapping, oracle: Oracle, degree: int | None = None) -> EvalForm:
    """Evaluate a primitive form at ``t = 0``.

    Each atom contributes ``oracle value * q^(its degree)``.  With ``degree``
    given, monomials of any other total degree are skipped without being
    evaluated.  A monomial with a vanishing factor is zero even if another
    factor lies outside the seed closure; otherwise
    :class:`IrreducibleCorrelator` propagates.
    """
    th = oracle.theory
    form = EvalForm()
    degree_of: dict = {}
    for (u, atoms), c in poly.items():
        total = 0
        for a in atoms:
            dg = degree_of.get(a, -1)
            if dg == -1:
                dg = degree_of[a] = atom_degree(th, a)
            if dg is None:
                break
            total += dg
        else:
            if degree is not None and total != degree:
                continue
            value = c
            missing = None
            for a in atoms:
                try:
                    v = oracle.value(a[0], a[1], degree_of[a])
                except IrreducibleCorrelator as exc:
                    missing = missing or exc
                    continue
                if not v:
                    value = ZERO
                    break
                value *= v
            if not value:
                continue
            if missing is not None:
                raise missing
            form.add(u, total, value)
    return form


def atom_signature(poly: Mapping) -> dict:
    """``{atoms: coefficient}`` ignoring the unknown tag (for structural checks)."""
    out: dict = defaultdict(Fraction)
    for (_, atoms), c in poly.items():
        out[atoms] += c
    return {k: v for k, v in out.items() if v}
