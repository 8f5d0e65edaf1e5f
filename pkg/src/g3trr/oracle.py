"""Exact values of primitive correlators at the origin of the big phase space.

A correlator is reduced with the string, dilaton and (for CP^1) divisor
equations until no removable insertion is left, and the remainder is looked
up in a seed table.  Seed tables ship as JSON under ``g3trr/data``; the
directory can be replaced wholesale with the ``G3TRR_SEED_DIR`` environment
variable, or extended record by record with an override file.
"""
from __future__ import annotations

import json
import os
import random
from fractions import Fraction
from importlib import resources
from math import prod
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .exactq import ONE, ZERO, fmt_q, parse_q
from .theory import CP1, POINT, CorrelatorKey, Insertion, TheorySpec, canonical, determine_degree

SEED_DIR_ENV = "G3TRR_SEED_DIR"

# (genus, degree, sorted insertions)
RawKey = tuple[int, int, tuple[Insertion, ...]]


class OracleError(Exception):
    pass


class IrreducibleCorrelator(OracleError):
    def __init__(self, key: CorrelatorKey):
        super().__init__(f"no seed for irreducible correlator {key}")
        self.key = key


class InvalidKey(OracleError, ValueError):
    pass


class ParseError(OracleError, ValueError):
    pass


class ConflictingSeed(OracleError, ValueError):
    def __init__(self, key: CorrelatorKey, builtin: Fraction, override: Fraction):
        super().__init__(f"override {key} = {fmt_q(override)} contradicts built-in {fmt_q(builtin)}")
        self.key = key


SeedTable = dict  # RawKey -> Fraction


def _seed_path(theory: TheorySpec) -> Path | None:
    base = os.environ.get(SEED_DIR_ENV)
    if base:
        return Path(base) / f"{theory.name}_seeds.json"
    return None


def parse_seed_records(theory: TheorySpec, records) -> SeedTable:
    if not isinstance(records, list):
        raise ParseError("seed file must hold a list of records")
    table: SeedTable = {}
    for rec in records:
        try:
            g = int(rec["genus"])
            d = int(rec.get("degree", 0))
            ins = []
            for item in rec["insertions"]:
                if isinstance(item, int):
                    ins.append(Insertion(item, 0))
                else:
                    n, a = item
                    ins.append(Insertion(int(n), int(a)))
            value = parse_q(str(rec["value"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad seed record {rec!r}: {exc}") from exc
        key = _raw_key(theory, g, ins, d)
        if key in table and table[key] != value:
            raise ParseError(f"duplicate seed {rec!r} with a different value")
        table[key] = value
    return table


def _raw_key(theory: TheorySpec, genus: int, insertions, degree: int = 0) -> RawKey:
    ins = canonical(insertions)
    if genus < 0 or degree < 0:
        raise InvalidKey("genus and degree must be non-negative")
    if not theory.tracks_degree and degree:
        raise InvalidKey("point correlators carry degree 0")
    for i in ins:
        if not 0 <= i.cls < theory.size:
            raise InvalidKey(f"class index {i.cls} invalid for {theory.name}")
    return genus, degree, ins


def load_seed_table(theory: TheorySpec, override: str | os.PathLike | None = None,
                    allow_replace: bool = False) -> SeedTable:
    """Built-in seeds for ``theory``, optionally extended from ``override``.

    An override entry that disagrees with a built-in raises
    :class:`ConflictingSeed` unless ``allow_replace`` is set.
    """
    path = _seed_path(theory)
    if path is not None:
        text = path.read_text()
    else:
        text = resources.files("g3trr").joinpath("data").joinpath(f"{theory.name}_seeds.json").read_text()
    try:
        table = parse_seed_records(theory, json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    if override is not None:
        try:
            extra = parse_seed_records(theory, json.loads(Path(override).read_text()))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{override}: {exc}") from exc
        for key, value in extra.items():
            if key in table and table[key] != value and not allow_replace:
                raise ConflictingSeed(CorrelatorKey(theory, key[0], key[2], key[1]),
                                      table[key], value)
            table[key] = value
    return table


def _removable(theory: TheorySpec, ins: Insertion) -> bool:
    if theory.tracks_degree:
        return ins in ((0, 0), (1, 0), (0, 1))
    return ins[0] <= 1


def _lowered(rest: tuple, j: int, cls: int | None = None):
    n, a = rest[j]
    if n == 0:
        return None
    new = list(rest)
    new[j] = Insertion(n - 1, a if cls is None else cls)
    return tuple(sorted(new))


Picker = Callable[[list[int]], int]


def _leftmost(idx: list[int]) -> int:
    return idx[0]


class Oracle:
    """Memoized correlator evaluator for one theory.

    ``fallback`` is an optional callable ``(genus, degree, insertions) ->
    Fraction | None`` consulted for irreducible keys missing from the seeds.
    """

    def __init__(self, theory: TheorySpec, seeds: SeedTable | None = None,
                 fallback: Callable | None = None):
        self.theory = theory
        self.seeds: Mapping[RawKey, Fraction] = dict(
            load_seed_table(theory) if seeds is None else seeds)
        self.fallback = fallback
        self._memo: dict[RawKey, Fraction] = {}
        if theory.tracks_degree:
            self._dilaton_const = Fraction(1, 12)
        else:
            self._dilaton_const = Fraction(1, 24)

    # -- public API ---------------------------------------------------------

    def evaluate(self, key: CorrelatorKey) -> Fraction:
        if key.theory != self.theory:
            raise InvalidKey(f"key for {key.theory.name} given to {self.theory.name} oracle")
        g, d, ins = _raw_key(self.theory, key.genus, key.insertions, key.degree)
        return self.value(g, ins, d)

    def __call__(self, genus: int, insertions, degree: int = 0) -> Fraction:
        g, d, ins = _raw_key(self.theory, genus, insertions, degree)
        return self.value(g, ins, d)

    def evaluate_in_order(self, key: CorrelatorKey, rng: random.Random) -> Fraction:
        """Unmemoized evaluation eliminating a random removable insertion each step."""
        g, d, ins = _raw_key(self.theory, key.genus, key.insertions, key.degree)

        def pick(idx):
            return rng.choice(idx)

        def rec(g_, ins_, d_):
            return self._reduce(g_, ins_, d_, pick, rec)

        return rec(g, ins, d)

    def is_reducible(self, genus: int, insertions) -> bool:
        return any(_removable(self.theory, i) for i in insertions)

    # -- internals ----------------------------------------------------------

    def value(self, g: int, ins: tuple, d: int = 0) -> Fraction:
        key = (g, d, ins)
        try:
            return self._memo[key]
        except KeyError:
            pass
        v = self._reduce(g, ins, d, _leftmost, self.value)
        self._memo[key] = v
        return v

    def _reduce(self, g, ins, d, pick: Picker, rec) -> Fraction:
        theory = self.theory
        k = len(ins)
        if ins and ins[0][0] < 0:
            return ZERO
        if determine_degree(theory, g, ins) != d:
            return ZERO
        seeded = self.seeds.get((g, d, ins))
        if seeded is not None:
            return seeded
        if d == 0 and ((g == 0 and k <= 2) or (g == 1 and k == 0)):
            return ZERO
        idx = [i for i, x in enumerate(ins) if _removable(theory, x)]
        if not idx:
            if self.fallback is not None:
                v = self.fallback(g, d, ins)
                if v is not None:
                    return v
            raise IrreducibleCorrelator(CorrelatorKey(theory, g, ins, d))
        i = pick(idx)
        x = ins[i]
        rest = ins[:i] + ins[i + 1:]
        k = len(rest)
        total = ZERO
        if x[0] == 0 and x[1] == 0:
            # string equation
            for j in range(k):
                low = _lowered(rest, j)
                if low is not None:
                    total += rec(g, low, d)
            if g == 0 and d == 0 and k == 2 and rest[0][0] == 0 and rest[1][0] == 0:
                if not theory.tracks_degree or rest[0][1] + rest[1][1] == 1:
                    total += ONE
        elif x[0] == 1:
            # dilaton equation
            total = (2 * g - 2 + k) * rec(g, rest, d) if 2 * g - 2 + k else ZERO
            if g == 1 and k == 0 and d == 0:
                total += self._dilaton_const
        else:
            # divisor equation, CP^1 only
            if d:
                total += d * rec(g, rest, d)
            for j in range(k):
                if rest[j][1] == 0:
                    low = _lowered(rest, j, cls=1)
                    if low is not None:
                        total += rec(g, low, d)
            if g == 0 and d == 0 and k == 2 and rest == ((0, 0), (0, 0)):
                total += ONE
            if g == 1 and d == 0 and k == 0:
                total -= Fraction(1, 24)
        return total

    def cache_size(self) -> int:
        return len(self._memo)


# ---------------------------------------------------------------------------
# Witten-Kontsevich numbers by the DVV recursion (optional, point only)

def _dfact(n: int) -> int:
    """Double factorial with (-1)!! = 1."""
    return prod(range(n, 0, -2)) if n > 0 else 1


class WittenKontsevich:
    """psi-class intersection numbers on M_{g,n} via the DVV recursion.

    Used as an optional fallback for the point theory; :meth:`agrees_with`
    must be checked against the seed table before activation.
    """

    def __init__(self):
        self._memo: dict[tuple[int, tuple[int, ...]], Fraction] = {}

    def __call__(self, g: int, d: int, ins) -> Fraction:
        if d:
            return ZERO
        return self.value(g, tuple(sorted(n for n, _ in ins)))

    def value(self, g: int, levels: tuple[int, ...]) -> Fraction:
        levels = tuple(sorted(levels))
        key = (g, levels)
        if key in self._memo:
            return self._memo[key]
        v = self._compute(g, levels)
        self._memo[key] = v
        return v

    def _compute(self, g: int, levels: tuple[int, ...]) -> Fraction:
        n = len(levels)
        if g < 0 or (levels and levels[0] < 0):
            return ZERO
        if sum(levels) != 3 * g - 3 + n:
            return ZERO
        if (g == 0 and n < 3) or (g == 1 and n == 0):
            return ZERO
        if g == 0 and levels == (0, 0, 0):
            return ONE
        if g == 1 and levels == (1,):
            return Fraction(1, 24)
        if levels[0] == 0:
            rest = levels[1:]
            return sum((self.value(g, rest[:j] + (rest[j] - 1,) + rest[j + 1:])
                        for j in range(len(rest)) if rest[j] > 0), ZERO)
        # DVV on the largest level
        k = levels[-1] - 1
        rest = levels[:-1]
        total = Fraction(0)
        for j, dj in enumerate(rest):
            other = rest[:j] + rest[j + 1:]
            total += Fraction(_dfact(2 * k + 2 * dj + 1), _dfact(2 * dj - 1)) * \
                self.value(g, other + (dj + k,))
        half = Fraction(1, 2)
        m = len(rest)
        for r in range(k):
            s = k - 1 - r
            w = _dfact(2 * r + 1) * _dfact(2 * s + 1)
            total += half * w * self.value(g - 1, rest + (r, s))
            for mask in range(1 << m):
                left = tuple(rest[t] for t in range(m) if mask >> t & 1)
                right = tuple(rest[t] for t in range(m) if not mask >> t & 1)
                for g1 in range(g + 1):
                    a = self.value(g1, left + (r,))
                    if a:
                        total += half * w * a * self.value(g - g1, right + (s,))
        return total / _dfact(2 * k + 3)

    def agrees_with(self, seeds: Mapping[RawKey, Fraction]) -> list[RawKey]:
        """Seed keys on which the recursion disagrees (empty when consistent)."""
        return [key for key, v in seeds.items()
                if self(key[0], key[1], key[2]) != v]


def make_oracle(theory: TheorySpec, override=None, recursive: bool | None = None,
                allow_replace: bool = False) -> Oracle:
    """Seeded oracle, optionally backed by a recursive computation.

    ``recursive`` adds the Witten-Kontsevich recursion for the point and the
    degree-0 Hodge-integral formula for CP^1; either is first checked against
    every seed.  It defaults to on for CP^1, whose tables alone do not close
    the degree-0 part of the genus-3 system, and off for the point.
    """
    seeds = load_seed_table(theory, override, allow_replace)
    if recursive is None:
        recursive = theory is CP1
    fallback = None
    if recursive:
        if theory is POINT:
            wk = WittenKontsevich()
            bad = wk.agrees_with(seeds)
            if bad:
                raise OracleError(f"recursive backend disagrees with seeds at {bad[:3]}")
            fallback = wk
        else:
            from .hodge import checked_cp1_fallback
            fallback = checked_cp1_fallback(seeds)
    return Oracle(theory, seeds, fallback)


def seed_keys(theory: TheorySpec, seeds: SeedTable) -> Iterable[CorrelatorKey]:
    for g, d, ins in seeds:
        yield CorrelatorKey(theory, g, ins, d)


__all__ = [
    "Oracle", "OracleError", "IrreducibleCorrelator", "InvalidKey", "ParseError",
    "ConflictingSeed", "load_seed_table", "make_oracle", "WittenKontsevich",
    "SEED_DIR_ENV", "CP1", "POINT",
]
