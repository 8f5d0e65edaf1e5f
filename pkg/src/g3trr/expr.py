"""Symbolic vector fields and correlation tensors on the big phase space.

Fields are built from constant basis fields with the level shifts
``tau_+``/``tau_-``, the operator ``T``, the quantum product and scaling by
scalar expressions.  All unsubscripted brackets inside ``T`` and the quantum
product are genus 0.

Index contractions are written with :class:`ContractIndex`, which binds a
variable used by :class:`IndexedBasis` leaves (``gamma_a`` lowered,
``gamma^a`` raised).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .theory import Insertion


class FieldExpr:
    __slots__ = ()

    def __add__(self, other):
        return field_sum(self, other)

    def __sub__(self, other):
        return field_sum(self, Scaled(Const(Fraction(-1)), other))


class ScalarExpr:
    __slots__ = ()

    def __add__(self, other):
        return scalar_sum(self, other)

    def __mul__(self, other):
        return product(self, other)


# -- fields -----------------------------------------------------------------

@dataclass(frozen=True)
class Basis(FieldExpr):
    ins: Insertion


@dataclass(frozen=True)
class IndexedBasis(FieldExpr):
    var: str
    raised: bool = False


@dataclass(frozen=True)
class TauPlus(FieldExpr):
    arg: FieldExpr


@dataclass(frozen=True)
class TauMinus(FieldExpr):
    arg: FieldExpr


@dataclass(frozen=True)
class T(FieldExpr):
    """``T(W) = tau_+(W) - <<W gamma^a>>_0 gamma_a``."""

    arg: FieldExpr


@dataclass(frozen=True)
class QProd(FieldExpr):
    """``W1 o W2 = <<W1 W2 gamma^a>>_0 gamma_a``."""

    left: FieldExpr
    right: FieldExpr


@dataclass(frozen=True)
class DualField(FieldExpr):
    """``<<V_1 ... V_k gamma^a>>_0 gamma_a``.

    The quantum product is the two-argument case; derivatives of products
    and of ``T`` produce the longer ones.
    """

    args: tuple[FieldExpr, ...]


@dataclass(frozen=True)
class Scaled(FieldExpr):
    coeff: ScalarExpr
    arg: FieldExpr


@dataclass(frozen=True)
class FieldSum(FieldExpr):
    terms: tuple[FieldExpr, ...]


ZERO_FIELD = FieldSum(())


# -- scalars ----------------------------------------------------------------

@dataclass(frozen=True)
class Const(ScalarExpr):
    value: Fraction


@dataclass(frozen=True)
class Unknown(ScalarExpr):
    index: int


@dataclass(frozen=True)
class Corr(ScalarExpr):
    genus: int
    args: tuple[FieldExpr, ...]

    def __post_init__(self):
        if self.genus not in (0, 1, 2, 3):
            raise ValueError(f"unsupported genus {self.genus}")


@dataclass(frozen=True)
class Product(ScalarExpr):
    factors: tuple[ScalarExpr, ...]


@dataclass(frozen=True)
class Sum(ScalarExpr):
    terms: tuple[ScalarExpr, ...]


@dataclass(frozen=True)
class ContractIndex(ScalarExpr):
    var: str
    body: ScalarExpr


ZERO = Sum(())

Expr = Union[FieldExpr, ScalarExpr]


# -- constructors -----------------------------------------------------------

def is_zero(e: Expr) -> bool:
    return e == ZERO_FIELD or e == ZERO or (isinstance(e, Const) and e.value == 0)


def field_sum(*terms: FieldExpr) -> FieldExpr:
    terms = tuple(t for t in terms if not is_zero(t))
    if len(terms) == 1:
        return terms[0]
    return FieldSum(terms)


def scalar_sum(*terms: ScalarExpr) -> ScalarExpr:
    terms = tuple(t for t in terms if not is_zero(t))
    if len(terms) == 1:
        return terms[0]
    return Sum(terms)


def product(*factors: ScalarExpr) -> ScalarExpr:
    if any(is_zero(f) for f in factors):
        return ZERO
    if len(factors) == 1:
        return factors[0]
    return Product(tuple(factors))


def neg(f: FieldExpr) -> FieldExpr:
    return Scaled(Const(Fraction(-1)), f)


def tau(level: int, cls: int = 0) -> Basis:
    return Basis(Insertion(level, cls))


def lo(var: str) -> IndexedBasis:
    return IndexedBasis(var, False)


def up(var: str) -> IndexedBasis:
    return IndexedBasis(var, True)


def corr(genus: int, *args: FieldExpr) -> Corr:
    return Corr(genus, tuple(args))


def qprod(*args: FieldExpr) -> FieldExpr:
    """Left-associated quantum product of two or more fields."""
    out = args[0]
    for a in args[1:]:
        out = QProd(out, a)
    return out


def contract(vars_: str, body: ScalarExpr) -> ScalarExpr:
    """Bind each character of ``vars_`` (outermost first) around ``body``."""
    for v in reversed(vars_):
        body = ContractIndex(v, body)
    return body


def t_power(w: FieldExpr, k: int) -> FieldExpr:
    for _ in range(k):
        w = T(w)
    return w


# -- covariant differentiation ----------------------------------------------

def nabla(f: FieldExpr, x: Insertion) -> FieldExpr:
    """Covariant derivative of a field along the constant field ``x``.

    Basis fields are parallel; ``T`` and the quantum product follow
    ``nabla_x T(V) = T(nabla_x V) - x o V`` and
    ``nabla_x (V o W) = (nabla_x V) o W + V o (nabla_x W) + <<V W x gamma^a>>_0 gamma_a``.
    """
    if isinstance(f, (Basis, IndexedBasis)):
        return ZERO_FIELD
    if isinstance(f, (TauPlus, TauMinus)):
        inner = nabla(f.arg, x)
        return ZERO_FIELD if is_zero(inner) else type(f)(inner)
    if isinstance(f, T):
        inner = nabla(f.arg, x)
        head = ZERO_FIELD if is_zero(inner) else T(inner)
        return field_sum(head, neg(QProd(Basis(x), f.arg)))
    if isinstance(f, QProd):
        a, b = nabla(f.left, x), nabla(f.right, x)
        return field_sum(ZERO_FIELD if is_zero(a) else QProd(a, f.right),
                         ZERO_FIELD if is_zero(b) else QProd(f.left, b),
                         DualField((f.left, f.right, Basis(x))))
    if isinstance(f, DualField):
        terms = [DualField(f.args + (Basis(x),))]
        for i, v in enumerate(f.args):
            dv = nabla(v, x)
            if not is_zero(dv):
                terms.append(DualField(f.args[:i] + (dv,) + f.args[i + 1:]))
        return field_sum(*terms)
    if isinstance(f, Scaled):
        ds, dv = directional_derivative(f.coeff, x), nabla(f.arg, x)
        return field_sum(ZERO_FIELD if is_zero(ds) else Scaled(ds, f.arg),
                         ZERO_FIELD if is_zero(dv) else Scaled(f.coeff, dv))
    if isinstance(f, FieldSum):
        return field_sum(*(nabla(t, x) for t in f.terms))
    raise TypeError(f"not a field expression: {f!r}")


def directional_derivative(e: ScalarExpr, x: Insertion) -> ScalarExpr:
    """Derivative of a scalar expression along the basis direction ``x``."""
    x = Insertion(*x)
    if isinstance(e, (Const, Unknown)):
        return ZERO
    if isinstance(e, Corr):
        terms = [Corr(e.genus, e.args + (Basis(x),))]
        for i, v in enumerate(e.args):
            dv = nabla(v, x)
            if not is_zero(dv):
                terms.append(Corr(e.genus, e.args[:i] + (dv,) + e.args[i + 1:]))
        return scalar_sum(*terms)
    if isinstance(e, Product):
        terms = []
        for i, f in enumerate(e.factors):
            df = directional_derivative(f, x)
            if not is_zero(df):
                terms.append(product(*e.factors[:i], df, *e.factors[i + 1:]))
        return scalar_sum(*terms)
    if isinstance(e, Sum):
        return scalar_sum(*(directional_derivative(t, x) for t in e.terms))
    if isinstance(e, ContractIndex):
        body = directional_derivative(e.body, x)
        return ZERO if is_zero(body) else ContractIndex(e.var, body)
    raise TypeError(f"not a scalar expression: {e!r}")
