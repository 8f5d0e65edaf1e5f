"""The genus-3 universal equation with unknown coefficients.

``phi(W)`` is minus the genus-3 correlator of ``T^3(W)`` plus thirty
boundary terms weighted by unknowns ``a_1 .. a_30``.  Evaluating derivatives
of ``phi(tau_m)`` at the origin of the point and CP^1 theories yields linear
relations among the unknowns; 29 of them pin ``a_2 .. a_30`` once ``a_1`` is
set to zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .exactq import ZERO, QMatrix, fmt_q, q, solve_unique
from .expr import (ZERO as ZERO_SCALAR, Basis, Const, FieldExpr, Product, ScalarExpr, Sum,
                   T, Unknown, contract, corr, is_zero, lo, qprod, t_power, up)
from .oracle import IrreducibleCorrelator, Oracle, make_oracle
from .primitive import EvalForm, Poly, differentiate, evaluate_at_origin, expand
from .theory import Insertion, TheorySpec, theory_by_name

UNKNOWNS = tuple(range(2, 31))


def _lhs(w: FieldExpr) -> ScalarExpr:
    return corr(3, t_power(w, 3))


def _terms(w: FieldExpr) -> dict[int, ScalarExpr]:
    W = w
    a, b, m = "a", "b", "m"
    return {
        1: contract("a", corr(2, T(W), qprod(lo(a), up(a)))),
        2: contract("a", corr(2, W, T(qprod(lo(a), up(a))))),
        3: contract("ab", corr(2, T(up(a))) * corr(0, lo(a), W, up(b), lo(b))),
        4: contract("a", corr(2, T(up(a))) * corr(1, qprod(lo(a), W))),
        5: contract("a", corr(2, qprod(W, lo(a), up(a)))),
        6: contract("ab", corr(1, W, up(a)) * corr(1, lo(a), qprod(up(b), lo(b)))),
        7: contract("ab", corr(1, up(a)) * corr(1, lo(a), W, qprod(up(b), lo(b)))),
        8: contract("abm", corr(1, up(a)) * corr(1, lo(a), up(b))
                    * corr(0, lo(b), W, up(m), lo(m))),
        9: contract("abm", corr(1, W, up(a)) * corr(0, lo(a), up(b), lo(b), up(m))
                    * corr(1, lo(m))),
        10: contract("abm", corr(1, up(a)) * corr(0, lo(a), W, up(b), lo(b), up(m))
                     * corr(1, lo(m))),
        11: contract("ab", corr(1, up(a), up(b)) * corr(1, lo(a), qprod(lo(b), W))),
        12: contract("ab", corr(1, up(a)) * corr(1, lo(a), up(b)) * corr(1, qprod(lo(b), W))),
        13: contract("ab", corr(1, W, up(a)) * corr(1, qprod(lo(a), lo(b))) * corr(1, up(b))),
        14: contract("abm", corr(1, up(a)) * corr(0, lo(a), W, up(b), up(m))
                     * corr(1, lo(b)) * corr(1, lo(m))),
        15: contract("ab", corr(1, up(a)) * corr(1, lo(a), up(b), qprod(lo(b), W))),
        16: contract("ab", corr(1, W, up(a), up(b)) * corr(1, qprod(lo(a), lo(b)))),
        17: contract("abm", corr(1, up(a), up(b)) * corr(0, lo(a), lo(b), W, up(m))
                     * corr(1, lo(m))),
        18: contract("ab", corr(1, up(a), up(b)) * corr(1, qprod(lo(a), lo(b)), W)),
        19: contract("abm", corr(1, W, up(a)) * corr(0, lo(a), lo(b), up(b), lo(m), up(m))),
        20: contract("abm", corr(1, up(a)) * corr(0, lo(a), W, up(b), lo(b), up(m), lo(m))),
        21: contract("abm", corr(1, W, up(a), up(b)) * corr(0, lo(a), lo(b), up(m), lo(m))),
        22: contract("abm", corr(1, up(a), up(b)) * corr(0, lo(a), lo(b), W, up(m), lo(m))),
        23: contract("abm", corr(0, W, up(a), lo(a), up(b), lo(b), up(m), lo(m))),
        24: contract("ab", corr(1, qprod(W, up(a))) * corr(1, lo(a), up(b), lo(b))),
        25: contract("ab", corr(1, W, up(a), lo(a), qprod(up(b), lo(b)))),
        26: contract("abm", corr(1, up(a), lo(a), up(b)) * corr(0, lo(b), W, up(m), lo(m))),
        27: contract("ab", corr(1, up(a), lo(a), up(b), qprod(lo(b), W))),
        28: contract("a", corr(2, T(lo(a)), qprod(W, up(a)))),
        29: contract("abm", corr(1, W, lo(a), lo(b), lo(m)) * corr(0, up(a), up(b), up(m))),
        30: contract("abm", corr(1, lo(a), lo(b), lo(m)) * corr(0, W, up(a), up(b), up(m))),
    }


def ansatz_term(i: int, w: FieldExpr) -> ScalarExpr:
    """The boundary term multiplying ``a_i`` (``i = 0`` gives the genus-3 LHS)."""
    return _lhs(w) if i == 0 else _terms(w)[i]


def build_phi(argument: FieldExpr, coeffs: Mapping[int, Fraction] | Sequence | None = None
              ) -> ScalarExpr:
    """``phi(argument)`` with symbolic unknowns, or fixed coefficients.

    ``coeffs`` may be a mapping ``{i: a_i}`` or a 30-long sequence
    ``a_1 .. a_30``.  In symbolic mode ``a_1`` is fixed to 0.
    """
    if is_zero(argument):
        return ZERO_SCALAR
    if coeffs is not None and not isinstance(coeffs, Mapping):
        if len(coeffs) != 30:
            raise ValueError("expected 30 coefficients a_1 .. a_30")
        coeffs = {i + 1: c for i, c in enumerate(coeffs)}
    parts: list[ScalarExpr] = [Product((Const(Fraction(-1)), _lhs(argument)))]
    for i, term in _terms(argument).items():
        if coeffs is None:
            weight = Const(ZERO) if i == 1 else Unknown(i)
        else:
            weight = Const(q(coeffs.get(i, ZERO)))
        parts.append(Product((weight, term)))
    return Sum(tuple(parts))


# -- manifests and relations ------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    theory: TheorySpec
    directions: tuple[Insertion, ...]
    argument: Insertion
    q_degree: int = 0

    @classmethod
    def from_record(cls, rec: Mapping) -> "ManifestEntry":
        th = theory_by_name(rec["theory"])
        dirs = tuple(Insertion(*_ins(x)) for x in rec.get("directions", []))
        arg = Insertion(*_ins(rec["argument"]))
        for i in dirs + (arg,):
            th.check(i)
        return cls(th, dirs, arg, int(rec.get("q_degree", 0)))

    def to_record(self) -> dict:
        return {"theory": self.theory.name,
                "directions": [list(d) for d in self.directions],
                "argument": list(self.argument), "q_degree": self.q_degree}

    def label(self) -> str:
        def s(i):
            return f"tau_{i.level}" if not self.theory.tracks_degree else f"tau_{i.level},{i.cls}"
        dirs = " ".join(s(d) for d in self.directions)
        head = f"{dirs} " if dirs else ""
        deg = f" [q^{self.q_degree}]" if self.theory.tracks_degree else ""
        return f"{self.theory.name}: {head}Phi({s(self.argument)}){deg}"


def _ins(x):
    return (x, 0) if isinstance(x, int) else tuple(x)


def load_manifest(path: str | Path | None = None) -> list[ManifestEntry]:
    """The default 29-relation manifest, or a manifest file."""
    if path is None:
        text = resources.files("g3trr").joinpath("data").joinpath("manifest.json").read_text()
    else:
        text = Path(path).read_text()
    return [ManifestEntry.from_record(r) for r in json.loads(text)]


@dataclass
class Relation:
    entry: ManifestEntry
    equation: dict[int, Fraction]  # unknown -> coefficient; 0 is the constant term

    @property
    def constant(self) -> Fraction:
        return self.equation.get(0, ZERO)

    def coefficient(self, i: int) -> Fraction:
        return self.equation.get(i, ZERO)

    def residual(self, values: Mapping[int, Fraction]) -> Fraction:
        return self.constant + sum((c * values.get(i, ZERO)
                                    for i, c in self.equation.items() if i), ZERO)

    def format(self) -> str:
        parts = [fmt_q(self.constant)]
        for i, c in sorted(self.equation.items()):
            if i:
                sign = "-" if c < 0 else "+"
                mag = "" if abs(c) == 1 else f"{fmt_q(abs(c))}*"
                parts.append(f"{sign} {mag}a_{i}")
        return "0 = " + " ".join(parts)

    def to_record(self) -> dict:
        return {**self.entry.to_record(), "constant": fmt_q(self.constant),
                "unknowns": {f"a_{i}": fmt_q(c) for i, c in sorted(self.equation.items()) if i}}


class Deriver:
    """Derives relations, caching the primitive form of each ``phi(tau)``."""

    def __init__(self, oracles: Mapping[str, Oracle] | None = None):
        self.oracles = dict(oracles or {})
        self._phi: dict = {}

    def oracle(self, theory: TheorySpec) -> Oracle:
        if theory.name not in self.oracles:
            self.oracles[theory.name] = make_oracle(theory)
        return self.oracles[theory.name]

    def phi_poly(self, theory: TheorySpec, argument: Insertion) -> Poly:
        key = (theory.name, argument)
        if key not in self._phi:
            self._phi[key] = expand(build_phi(Basis(argument)), theory)
        return self._phi[key]

    def form(self, entry: ManifestEntry, degree: int | None = None) -> EvalForm:
        poly = self.phi_poly(entry.theory, entry.argument)
        for x in entry.directions:
            poly = differentiate(poly, x)
        return evaluate_at_origin(poly, self.oracle(entry.theory), degree)

    def derive(self, entry: ManifestEntry) -> Relation:
        form = self.form(entry, entry.q_degree)
        return Relation(entry, form.restrict(entry.q_degree))


def derive_relation(entry: ManifestEntry, deriver: Deriver | None = None) -> Relation:
    return (deriver or Deriver()).derive(entry)


@dataclass
class LinearSystem:
    matrix: QMatrix
    rhs: list[Fraction]
    unknowns: tuple[int, ...]
    relations: list[Relation]

    def solve(self) -> dict[int, Fraction]:
        """``{i: a_i}`` for ``i = 1 .. 30`` with ``a_1 = 0``."""
        x = solve_unique(self.matrix, self.rhs)
        out = {1: ZERO}
        out.update(zip(self.unknowns, x))
        return out


def assemble_system(manifest: Iterable[ManifestEntry], deriver: Deriver | None = None
                    ) -> LinearSystem:
    deriver = deriver or Deriver()
    rels = [deriver.derive(e) for e in manifest]
    rows = [[r.coefficient(i) for i in UNKNOWNS] for r in rels]
    rhs = [-r.constant for r in rels]
    return LinearSystem(QMatrix.from_rows(rows, len(UNKNOWNS)), rhs, UNKNOWNS, rels)


# -- verification sweep -----------------------------------------------------

@dataclass(frozen=True)
class Sweep:
    theory: TheorySpec
    directions: tuple[Insertion, ...]
    arguments: tuple[Insertion, ...]
    max_derivatives: int
    degrees: tuple[int, ...] = (0,)

    def combos(self) -> Iterable[tuple[tuple[Insertion, ...], Insertion]]:
        for arg in self.arguments:
            for k in range(self.max_derivatives + 1):
                for dirs in combinations_with_replacement(self.directions, k):
                    yield dirs, arg


@dataclass
class VerifyReport:
    checked: int = 0
    nontrivial: int = 0
    skipped_irreducible: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "VerifyReport") -> "VerifyReport":
        return VerifyReport(self.checked + other.checked, self.nontrivial + other.nontrivial,
                            self.skipped_irreducible + other.skipped_irreducible,
                            self.failures + other.failures)


def verify_identity(sweep: Sweep, coeffs: Mapping[int, Fraction],
                    deriver: Deriver | None = None,
                    on_combo: Callable | None = None) -> VerifyReport:
    """Check ``phi = 0`` with fixed coefficients on every combo of the sweep.

    The symbolic form is evaluated and then the coefficients substituted, so
    each combo also reports whether it constrains the unknowns at all
    (``nontrivial``).  Combos leaving the seed closure are skipped.
    """
    deriver = deriver or Deriver()
    oracle = deriver.oracle(sweep.theory)
    values = {i: q(v) for i, v in coeffs.items()}
    report = VerifyReport()
    pool = sweep.directions

    def visit(poly, dirs, arg):
        for d in sweep.degrees:
            entry = ManifestEntry(sweep.theory, dirs, arg, d)
            try:
                form = evaluate_at_origin(poly, oracle, d)
            except IrreducibleCorrelator as exc:
                report.skipped_irreducible.append((entry, exc.key))
                continue
            report.checked += 1
            if not form.is_zero():
                report.nontrivial += 1
            residual = form.substitute(values).get(d, ZERO)
            if residual:
                report.failures.append((entry, residual))
            if on_combo is not None:
                on_combo(entry, residual)

    def walk(poly, start, dirs, arg):
        visit(poly, dirs, arg)
        if len(dirs) == sweep.max_derivatives:
            return
        for j in range(start, len(pool)):
            walk(differentiate(poly, pool[j]), j, dirs + (pool[j],), arg)

    for arg in sweep.arguments:
        walk(deriver.phi_poly(sweep.theory, arg), 0, (), arg)
    return report


def verify_manifest(manifest: Iterable[ManifestEntry], coeffs: Mapping[int, Fraction],
                    deriver: Deriver | None = None) -> VerifyReport:
    deriver = deriver or Deriver()
    values = {i: q(v) for i, v in coeffs.items()}
    report = VerifyReport()
    for e in manifest:
        rel = deriver.derive(e)
        report.checked += 1
        report.nontrivial += bool(rel.equation)
        r = rel.residual(values)
        if r:
            report.failures.append((e, r))
    return report


POINT_SWEEP_DEFAULT = dict(directions=[(0, 0), (1, 0), (2, 0), (3, 0)],
                           arguments=[(m, 0) for m in range(5)], max_derivatives=5)
