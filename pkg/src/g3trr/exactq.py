"""Exact rational arithmetic and linear algebra over Q.

Scalars are :class:`fractions.Fraction`, which is always kept in lowest terms
with a positive denominator.  This module adds a small dense matrix type,
reduced row-echelon form and a unique-solution solver, plus the ``"p/q"``
text format used in every report.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Singular(ArithmeticError):
    """The system has fewer independent equations than unknowns."""

    def __init__(self, rank: int, unknowns: int):
        super().__init__(f"rank {rank} < {unknowns} unknowns")
        self.rank = rank
        self.unknowns = unknowns


class Inconsistent(ArithmeticError):
    """The augmented matrix has larger rank than the coefficient matrix."""

    def __init__(self, rank: int, augmented_rank: int):
        super().__init__(f"coefficient rank {rank}, augmented rank {augmented_rank}")
        self.rank = rank
        self.augmented_rank = augmented_rank


def q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    return Fraction(value)


def fmt_q(x: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    x = q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_q(text: str) -> Fraction:
    text = text.strip()
    if not text or any(c in text for c in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "QMatrix":
        rows = [[q(x) for x in r] for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.from_rows([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def matvec(self, x: Sequence[Fraction]) -> list[Fraction]:
        if len(x) != self.cols:
            raise ValueError("dimension mismatch")
        return [sum((a * b for a, b in zip(self.row(i), x)), ZERO) for i in range(self.rows)]

    def augment(self, column: Sequence[Fraction]) -> "QMatrix":
        if len(column) != self.rows:
            raise ValueError("dimension mismatch")
        return QMatrix.from_rows([r + [q(c)] for r, c in zip(self.to_rows(), column)],
                                 self.cols + 1)


def _size(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def rref(m: QMatrix) -> tuple[QMatrix, int, list[int]]:
    """Reduced row-echelon form, rank and pivot columns.

    Pivots are chosen among the candidate rows by smallest bit size, which
    keeps intermediate fractions short; the result does not depend on it.
    """
    a = m.to_rows()
    nrows, ncols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        cand = [i for i in range(r, nrows) if a[i][c] != 0]
        if not cand:
            continue
        p = min(cand, key=lambda i: _size(a[i][c]))
        a[r], a[p] = a[p], a[r]
        inv = ONE / a[r][c]
        a[r] = [x * inv for x in a[r]]
        pivot_row = a[r]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], pivot_row)]
        pivots.append(c)
        r += 1
    return QMatrix.from_rows(a, ncols), len(pivots), pivots


def rank(m: QMatrix) -> int:
    return rref(m)[1]


def solve_unique(coeffs: QMatrix, rhs: Sequence) -> list[Fraction]:
    """Return the unique ``x`` with ``coeffs @ x == rhs``.

    Raises :class:`Inconsistent` if there is no solution and :class:`Singular`
    if there is more than one.
    """
    rhs = [q(b) for b in rhs]
    reduced, rk, pivots = rref(coeffs.augment(rhs))
    n = coeffs.cols
    if n in pivots:
        raise Inconsistent(rk - 1, rk)
    if rk < n:
        raise Singular(rk, n)
    return [reduced[i, n] for i in range(n)]


def dot(xs: Iterable[Fraction], ys: Iterable[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(xs, ys)), ZERO)
