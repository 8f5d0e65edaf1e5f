"""Static description of the target theories and correlator keys.

Two theories are modelled: the point (one class, trivial pairing) and CP^1
(classes 1 and the point class, antidiagonal pairing).  Insertions are plain
``(level, class_index)`` tuples so they hash and sort cheaply; the
:class:`CorrelatorKey` dataclass wraps them for public APIs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .exactq import ONE, ZERO, QMatrix


class Insertion(NamedTuple):
    """``tau_level(gamma_cls)``.  Negative levels denote the zero field."""

    level: int
    cls: int = 0

    def __str__(self):
        return f"tau_{self.level},{self.cls}"


@dataclass(frozen=True)
class TheorySpec:
    name: str
    degrees: tuple[int, ...]            # complex degree of each basis class
    pairing: tuple[tuple[Fraction, ...], ...]
    tracks_degree: bool
    inverse: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.degrees)
        eta = QMatrix.from_rows(self.pairing)
        if eta.rows != n or eta.cols != n:
            raise ValueError("pairing must be square with one row per class")
        if any(eta[i, j] != eta[j, i] for i in range(n) for j in range(n)):
            raise ValueError("pairing must be symmetric")
        # local import keeps exactq free of theory knowledge
        from .exactq import solve_unique
        cols = [solve_unique(eta, [ONE if i == j else ZERO for i in range(n)])
                for j in range(n)]
        object.__setattr__(self, "inverse",
                           tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.degrees)

    def check(self, ins: Insertion) -> None:
        if not (0 <= ins[1] < self.size):
            raise ValueError(f"class index {ins[1]} out of range for {self.name}")

    def __str__(self):
        return self.name


POINT = TheorySpec("point", (0,), ((ONE,),), tracks_degree=False)
CP1 = TheorySpec("cp1", (0, 1), ((ZERO, ONE), (ONE, ZERO)), tracks_degree=True)

THEORIES = {"point": POINT, "cp1": CP1}


def theory_by_name(name: str) -> TheorySpec:
    try:
        return THEORIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown theory {name!r}; expected one of {sorted(THEORIES)}")


def canonical(insertions: Iterable) -> tuple[Insertion, ...]:
    return tuple(sorted(Insertion(*i) for i in insertions))


@dataclass(frozen=True)
class CorrelatorKey:
    theory: TheorySpec
    genus: int
    insertions: tuple[Insertion, ...]
    degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "insertions", canonical(self.insertions))
        if not self.theory.tracks_degree and self.degree != 0:
            raise ValueError("point correlators carry degree 0")

    def __str__(self):
        body = " ".join(str(i) for i in self.insertions)
        sub = f"{self.genus},{self.degree}" if self.theory.tracks_degree else f"{self.genus}"
        return f"<{body}>_{sub}"


def determine_degree(theory: TheorySpec, genus: int, insertions) -> int | None:
    """The only Novikov degree at which the correlator can be nonzero.

    Point: 0 if the psi-degrees fill ``3g - 3 + k``, else None.  CP^1: the
    ``d >= 0`` with ``sum(n_i + deg(alpha_i)) = 2g - 2 + 2d + k``.
    """
    k = len(insertions)
    if theory.tracks_degree:
        weight = sum(n + theory.degrees[a] for n, a in insertions)
        twice_d = weight - (2 * genus - 2 + k)
        if twice_d < 0 or twice_d % 2:
            return None
        return twice_d // 2
    if sum(n for n, _ in insertions) == 3 * genus - 3 + k:
        return 0
    return None


def metric_raise(theory: TheorySpec, alpha: int) -> list[tuple[int, Fraction]]:
    """Expansion of ``gamma^alpha = eta^{alpha beta} gamma_beta``."""
    row = theory.inverse[alpha]
    return [(b, c) for b, c in enumerate(row) if c != 0]


def metric_lower(theory: TheorySpec, alpha: int) -> list[tuple[int, Fraction]]:
    row = theory.pairing[alpha]
    return [(b, c) for b, c in enumerate(row) if c != 0]
