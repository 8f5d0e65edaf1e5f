"""Hodge integrals and degree-0 invariants of CP^1.

Integrals ``<ch_{2l_1-1}(E) ... ch_{2l_m-1}(E) tau_{n_1} ... tau_{n_k}>_g`` are
reduced to psi-class numbers with Mumford's formula for the Chern character of
the Hodge bundle,

    ch_{2l-1}(E) = B_{2l}/(2l)! [kappa_{2l-1} - sum psi_i^{2l-1}
                   + 1/2 sum_{a+b=2l-2} (-1)^a iota_*(psi^a psi'^b)],

with ``kappa_a`` traded for an extra ``tau_{a+1}`` and the boundary pushforward
split over the irreducible and reducible gluing maps.  Lambda classes come
from ``c(E) = exp(sum (2l-2)! ch_{2l-1})``.

Degree-0 CP^1 invariants are Hodge integrals through the obstruction bundle
``E^v [x] T``: with no point-class insertion the integrand is
``2 (-1)^(g-1) lambda_{g-1}``, with one it is ``(-1)^g lambda_g``, and two or
more vanish.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Mapping

from .exactq import ONE, ZERO
from .oracle import OracleError, RawKey, WittenKontsevich


def bernoulli(n: int) -> Fraction:
    """``B_n`` with ``B_1 = -1/2``."""
    b = [ONE]
    for m in range(1, n + 1):
        b.append(-sum((comb(m + 1, j) * b[j] for j in range(m)), ZERO) / (m + 1))
    return b[n]


def _lambda_monomials(j: int) -> dict[tuple[int, ...], Fraction]:
    """``lambda_j`` as ``{sorted l's: coefficient}`` in the classes ``ch_{2l-1}``."""
    out: dict = {}

    def rec(l, deg, mono, coeff):
        if deg == j:
            out[mono] = out.get(mono, ZERO) + coeff
            return
        if deg + 2 * l - 1 > j:
            return
        k = 0
        while deg + k * (2 * l - 1) <= j:
            rec(l + 1, deg + k * (2 * l - 1), mono + (l,) * k,
                coeff * Fraction(factorial(2 * l - 2) ** k, factorial(k)))
            k += 1

    rec(1, 0, (), ONE)
    return out


class HodgeIntegrals:
    """Exact Hodge integrals on moduli of stable curves."""

    def __init__(self, wk: WittenKontsevich | None = None):
        self.wk = wk or WittenKontsevich()
        self._memo: dict = {}
        self._bern: dict[int, Fraction] = {}

    def _coeff(self, l: int) -> Fraction:
        if l not in self._bern:
            self._bern[l] = bernoulli(2 * l) / factorial(2 * l)
        return self._bern[l]

    def ch(self, g: int, levels, chs=()) -> Fraction:
        """``<prod ch_{2l-1}(E) prod tau_n>_g`` for ``l`` in ``chs``."""
        key = (g, tuple(sorted(levels)), tuple(sorted(chs)))
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._ch(*key)
        return hit

    def _ch(self, g, levels, chs) -> Fraction:
        n = len(levels)
        if g < 0 or 2 * g - 2 + n <= 0:
            return ZERO
        if sum(levels) + sum(2 * l - 1 for l in chs) != 3 * g - 3 + n:
            return ZERO
        if not chs:
            return self.wk.value(g, levels)
        if g == 0:
            return ZERO
        l, rest = chs[0], chs[1:]
        total = self.ch(g, levels + (2 * l,), rest)
        for j in range(n):
            total -= self.ch(g, levels[:j] + (levels[j] + 2 * l - 1,) + levels[j + 1:], rest)
        m = len(rest)
        boundary = ZERO
        for a in range(2 * l - 1):
            b = 2 * l - 2 - a
            sign = -1 if a % 2 else 1
            part = self.ch(g - 1, levels + (a, b), rest)
            for mask in range(1 << n):
                left = tuple(levels[t] for t in range(n) if mask >> t & 1)
                right = tuple(levels[t] for t in range(n) if not mask >> t & 1)
                for cmask in range(1 << m):
                    c1 = tuple(rest[t] for t in range(m) if cmask >> t & 1)
                    c2 = tuple(rest[t] for t in range(m) if not cmask >> t & 1)
                    for g1 in range(g + 1):
                        x = self.ch(g1, left + (a,), c1)
                        if x:
                            part += x * self.ch(g - g1, right + (b,), c2)
            boundary += sign * part
        return self._coeff(l) * (total + boundary / 2)

    def lambda_(self, g: int, levels, j: int) -> Fraction:
        """``int_{M_{g,n}} lambda_j prod psi_i^{n_i}``."""
        if j < 0 or j > g:
            return ZERO
        return sum((c * self.ch(g, levels, mono)
                    for mono, c in _lambda_monomials(j).items()), ZERO)


class CP1DegreeZero:
    """Degree-0 CP^1 invariants from Hodge integrals.

    Usable as an :class:`~g3trr.oracle.Oracle` fallback; answers ``None`` for
    positive degree so those keys still surface as irreducible.
    """

    def __init__(self, hodge: HodgeIntegrals | None = None):
        self.hodge = hodge or HodgeIntegrals()

    def __call__(self, g: int, d: int, ins) -> Fraction | None:
        if d:
            return None
        return self.value(g, ins)

    def value(self, g: int, ins) -> Fraction:
        points = sum(1 for _, a in ins if a == 1)
        levels = tuple(n for n, _ in ins)
        if points >= 2:
            return ZERO
        if points == 1:
            return (-1) ** g * self.hodge.lambda_(g, levels, g)
        if g == 0:
            return ZERO
        return 2 * (-1) ** (g - 1) * self.hodge.lambda_(g, levels, g - 1)

    def agrees_with(self, seeds: Mapping[RawKey, Fraction]) -> list[RawKey]:
        """Degree-0 seed keys on which the formula disagrees."""
        return [key for key, v in seeds.items()
                if key[1] == 0 and self.value(key[0], key[2]) != v]


def checked_cp1_fallback(seeds: Mapping[RawKey, Fraction]) -> CP1DegreeZero:
    fb = CP1DegreeZero()
    bad = fb.agrees_with(seeds)
    if bad:
        raise OracleError(f"degree-0 Hodge backend disagrees with seeds at {bad[:3]}")
    return fb
