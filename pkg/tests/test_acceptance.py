"""Acceptance criteria, one test each, with a one-line pass/fail summary.

Run with pytest (the summary lines appear at the end of the session) or
directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import subprocess
import sys
from fractions import Fraction
from math import prod
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import REFERENCE, load_printed  # noqa: E402
from g3trr.ansatz import (POINT_SWEEP_DEFAULT, Deriver, Sweep, UNKNOWNS, assemble_system,  # noqa: E402
                          build_phi, load_manifest, verify_identity, verify_manifest)
from g3trr.exactq import rank  # noqa: E402
from g3trr.expr import Basis, directional_derivative  # noqa: E402
from g3trr.oracle import IrreducibleCorrelator, Oracle, load_seed_table, make_oracle  # noqa: E402
from g3trr.primitive import Expander  # noqa: E402
from g3trr.rspin import SpinSpec, admissible_insertions, cross_check_r2  # noqa: E402
from g3trr.tautograph import automorphism_order, load_graphs, translate_and_match  # noqa: E402
from g3trr.theory import CP1, POINT, CorrelatorKey, Insertion, metric_lower, metric_raise  # noqa: E402

F = Fraction
RESULTS: dict[int, tuple[bool, str]] = {}

_cache: dict = {}


def _deriver():
    if "d" not in _cache:
        _cache["d"] = Deriver()
    return _cache["d"]


def _solution():
    if "s" not in _cache:
        _cache["sys"] = assemble_system(load_manifest(), _deriver())
        _cache["s"] = _cache["sys"].solve()
    return _cache["s"]


def criterion_1():
    d = _deriver()
    manifest = load_manifest()
    printed = load_printed()
    bad = [i + 1 for i, e in enumerate(manifest) if d.derive(e).equation != printed[i]]
    r1 = d.derive(manifest[0]).equation
    pin = r1 == {0: F(-1, 82944), 2: F(1, 384), 23: F(1), 25: F(1, 24), 29: F(1, 24)}
    return not bad and pin and len(manifest) == 29, f"29 relations, mismatches {bad}"


def criterion_2():
    sol = _solution()
    rk = rank(_cache["sys"].matrix)
    ok = rk == 29 and {i: sol[i] for i in UNKNOWNS} == REFERENCE
    return ok, f"rank {rk}, a_2 = {sol[2]}, a_30 = {sol[30]}"


def criterion_3():
    sol = _solution()
    d = _deriver()
    man = verify_manifest(load_manifest(), sol, d)
    ins = lambda xs: tuple(Insertion(*x) for x in xs)  # noqa: E731
    point = verify_identity(Sweep(POINT, ins(POINT_SWEEP_DEFAULT["directions"]),
                                  ins(POINT_SWEEP_DEFAULT["arguments"]),
                                  POINT_SWEEP_DEFAULT["max_derivatives"]), sol, d)
    seeds_only = Deriver({"cp1": make_oracle(CP1, recursive=False)})
    pool = ins([(n, a) for n in range(4) for a in range(2)])
    cp1 = verify_identity(Sweep(CP1, pool, pool, 2, (0, 1, 2)), sol, seeds_only)
    extra = point.checked + cp1.checked
    ok = man.checked == 29 and man.ok and point.ok and cp1.ok and point.checked >= 100
    return ok, (f"manifest 29/29 zero; point {point.checked} combos, cp1 {cp1.checked} combos "
                f"within seed closure ({len(cp1.skipped_irreducible)} skipped); {extra} extra")


def criterion_4():
    a23 = _solution()[23]
    target = F(1, prod(range(7, 0, -2)) * 8 ** 3)
    return a23 == target == F(1, 53760), f"a_23 = {a23}"


def criterion_5():
    rng = random.Random(0)
    count = 0
    ok = True
    for theory in (POINT, CP1):
        table = load_seed_table(theory)
        oracle = Oracle(theory, table)
        for (g, d, ins), v in table.items():
            key = CorrelatorKey(theory, g, ins, d)
            for _ in range(3):
                ok &= oracle.evaluate_in_order(key, rng) == v
            # dilaton padding gives every seed a reducible neighbour
            if ins:
                padded = CorrelatorKey(theory, g, ins + ((1, 0),), d)
                ok &= oracle.evaluate_in_order(padded, rng) == (2 * g - 2 + len(ins)) * v
            count += 1
    p = make_oracle(POINT)
    c = make_oracle(CP1, recursive=False)
    pins = (p(0, [(0, 0)] * 3) == 1 and p(1, [(1, 0)]) == F(1, 24)
            and c(1, [(0, 1)], 0) == F(-1, 24) and c(0, [(0, 1), (0, 1)], 1) == 1)
    npoint = len(load_seed_table(POINT))
    return ok and pins, f"{count} seeds round-trip ({npoint} point seeds), axiom pins ok={pins}"


def criterion_6():
    want = {2: [((7, 0),)], 3: [((6, 1),)], 4: [((6, 0),)], 5: [], 6: [((5, 4),)], 7: [((5, 4),)]}
    got = {r: [tuple(tuple(i) for i in c.insertions) for c, _ in
               admissible_insertions(SpinSpec(r), 3, 1)] for r in want}
    pairs = {tuple(tuple(i) for i in c.insertions) for c, _ in
             admissible_insertions(SpinSpec(3), 3, 2)}
    expect_pairs = {tuple(sorted(((n, 0), (7 - n, 1)))) for n in range(8)}
    cross = cross_check_r2(make_oracle(POINT))
    ok = got == want and pairs == expect_pairs and cross.ok and cross.point_value == F(1, 82944)
    return ok, f"one-point sets match {got == want}, 8 pairs {pairs == expect_pairs}, r=2 {cross.ok}"


def criterion_7():
    rel = load_graphs()
    rep = translate_and_match(rel, _solution())
    auts = [automorphism_order(g) for g, _ in rel.entries]
    ok = rep.multiset_ok and auts[0] == 2 and auts[28] == 48 and auts[2] == 1
    return ok, f"multiset match {rep.multiset_ok}; |Aut| a_2 {auts[0]}, a_23 {auts[28]}, a_28 {auts[2]}"


def criterion_8():
    d = _deriver()
    manifest = load_manifest()
    ok = True
    pairs_checked = 0
    for theory in (POINT, CP1):
        entries = [e for e in manifest if e.theory is theory]
        dirs = sorted({x for e in entries for x in e.directions})
        args = sorted({e.argument for e in entries})
        ex = Expander(theory)
        pairs = [(x, y) for i, x in enumerate(dirs) for y in dirs[i + 1:]]
        for k, (x, y) in enumerate(pairs):
            phi = build_phi(Basis(args[k % len(args)]))
            xy = directional_derivative(directional_derivative(phi, x), y)
            yx = directional_derivative(directional_derivative(phi, y), x)
            ok &= ex.scalar(xy) == ex.scalar(yx)
            pairs_checked += 1
    # order independence on randomized keys in the seed closure
    rng = random.Random(1)
    keys = 0
    for theory in (POINT, CP1):
        oracle = make_oracle(theory, recursive=False)
        removable = [(0, 0), (1, 0)] + ([(0, 1)] if theory is CP1 else [])
        seeds = sorted(oracle.seeds)
        while keys < (100 if theory is POINT else 220):
            g, deg, ins = rng.choice(seeds)
            ins = list(ins) + [rng.choice(removable) for _ in range(rng.randint(1, 3))]
            key = CorrelatorKey(theory, g, ins, deg)
            try:
                ref = oracle.evaluate(key)
            except IrreducibleCorrelator:
                continue
            ok &= all(oracle.evaluate_in_order(key, rng) == ref for _ in range(3))
            keys += 1
    # metric involution
    for theory in (POINT, CP1):
        for a in range(theory.size):
            back: dict = {}
            for b, c in metric_raise(theory, a):
                for e, w in metric_lower(theory, b):
                    back[e] = back.get(e, 0) + c * w
            ok &= {k: v for k, v in back.items() if v} == {a: 1}
    # byte-identical reports
    cmd = [sys.executable, "-m", "g3trr.cli", "--format", "json", "system"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    ok &= outs[0] == outs[1] and bool(outs[0])
    return ok, f"{pairs_checked} direction pairs, {keys} random keys, metric, reports identical"


CRITERIA = {
    1: ("relation reproduction", criterion_1),
    2: ("coefficient solution", criterion_2),
    3: ("identity verification", criterion_3),
    4: ("purely genus-0 coefficient", criterion_4),
    5: ("oracle fidelity", criterion_5),
    6: ("r-spin selection", criterion_6),
    7: ("tautological translation", criterion_7),
    8: ("structural properties", criterion_8),
}


def summary_line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"criterion {n} [{CRITERIA[n][0]}]: {'PASS' if ok else 'FAIL'} ({detail})"


def _run(n: int):
    try:
        RESULTS[n] = CRITERIA[n][1]()
    except Exception as exc:   # recorded as a failure, then re-raised by the test
        RESULTS[n] = (False, f"{type(exc).__name__}: {exc}")
        raise
    print(summary_line(n))
    return RESULTS[n][0]


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    assert _run(n), summary_line(n)


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        try:
            failed += not _run(n)
        except Exception:
            failed += 1
            print(summary_line(n))
    sys.exit(1 if failed else 0)
