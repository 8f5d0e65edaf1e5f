"""Selection rules for r-spin correlators and the genus-3 reference values.

For r-spin theory the virtual class has degree
``D = ((r - 2)(g - 1) + sum alpha_i) / r`` and a correlator
``<tau_{n_1,alpha_1} ... tau_{n_k,alpha_k}>_g`` can be nonzero only when D is
a non-negative integer and ``sum n_i + D = 3g - 3 + k``.  Values for r >= 3
are stored reference data, not recomputed here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import NamedTuple

from .theory import Insertion


@dataclass(frozen=True)
class SpinSpec:
    r: int

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be at least 2")

    @property
    def classes(self) -> range:
        return range(self.r - 1)

    def pairing(self, a: int, b: int) -> int:
        return 1 if a + b == self.r - 2 else 0

    def raise_index(self, a: int) -> int:
        return self.r - 2 - a


class SpinCorrelator(NamedTuple):
    genus: int
    insertions: tuple[Insertion, ...]

    def __str__(self):
        body = " ".join(str(i) for i in self.insertions)
        return f"<{body}>_{self.genus}"


def virtual_degree(spec: SpinSpec, g: int, classes) -> int | None:
    """D as an integer, or None when it is fractional or negative."""
    num = (spec.r - 2) * (g - 1) + sum(classes)
    if num < 0 or num % spec.r:
        return None
    return num // spec.r


def admissible_insertions(spec: SpinSpec, g: int, k: int) -> list[tuple[SpinCorrelator, int]]:
    """Every k-point genus-g correlator allowed by the selection rules, with D."""
    if g < 0 or k < 0:
        raise ValueError("genus and point count must be non-negative")
    dim = 3 * g - 3 + k
    out = []
    for alphas in combinations_with_replacement(spec.classes, k):
        d = virtual_degree(spec, g, alphas)
        if d is None or d > dim:
            continue
        for levels in _compositions(dim - d, k):
            ins = tuple(sorted(Insertion(n, a) for n, a in zip(levels, alphas)))
            out.append((SpinCorrelator(g, ins), d))
    seen = set()
    uniq = []
    for c, d in sorted(out):
        if c not in seen:
            seen.add(c)
            uniq.append((c, d))
    return uniq


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _c(g, *pairs):
    return SpinCorrelator(g, tuple(sorted(Insertion(n, a) for n, a in pairs)))


UNKNOWN = None

# genus-3 one- and two-point values; None marks an admissible entry whose
# value is not available
_TABLE = {
    2: {_c(3, (7, 0)): Fraction(1, 82944)},
    3: {
        _c(3, (6, 1)): Fraction(1, 31104),
        _c(3, (7, 0), (0, 1)): Fraction(1, 15552),
        _c(3, (6, 0), (1, 1)): Fraction(19, 77760),
        _c(3, (5, 0), (2, 1)): Fraction(47, 77760),
        _c(3, (4, 0), (3, 1)): Fraction(67, 77760),
        _c(3, (3, 0), (4, 1)): Fraction(443, 77760),
        _c(3, (2, 0), (5, 1)): Fraction(103, 217728),
        _c(3, (1, 0), (6, 1)): Fraction(5, 31104),
        _c(3, (0, 0), (7, 1)): Fraction(1, 31104),
    },
    4: {_c(3, (6, 0)): Fraction(3, 20480)},
    5: {},
    6: {_c(3, (5, 4)): Fraction(2561, 20901888)},
}


def proposition_table(r: int | None = None) -> dict:
    """Reference genus-3 values, for one r or as ``{r: {correlator: value}}``.

    r >= 7 lists the single admissible one-point correlator with value None.
    """
    if r is None:
        return {k: dict(v) for k, v in _TABLE.items()}
    if r >= 7:
        return {_c(3, (5, 4)): UNKNOWN}
    return dict(_TABLE.get(r, {}))


def reference_value(r: int, corr: SpinCorrelator):
    return proposition_table(r).get(corr, UNKNOWN)


@dataclass
class CrossCheck:
    spin_value: Fraction
    point_value: Fraction

    @property
    def ok(self) -> bool:
        return self.spin_value == self.point_value


def cross_check_r2(point_oracle) -> CrossCheck:
    """2-spin theory is the point theory: compare <tau_7,0>_3 with <tau_7>_3."""
    spin = _TABLE[2][_c(3, (7, 0))]
    return CrossCheck(spin, point_oracle(3, [(7, 0)]))
