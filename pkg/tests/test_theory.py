import itertools
import random

import pytest

from g3trr.oracle import load_seed_table
from g3trr.theory import (CP1, POINT, CorrelatorKey, Insertion, TheorySpec, determine_degree,
                          metric_lower, metric_raise, theory_by_name)


def test_degree_examples():
    assert determine_degree(POINT, 3, [(7, 0)]) == 0
    assert determine_degree(CP1, 1, [(2, 1)]) == 1
    assert determine_degree(POINT, 2, [(2, 0)]) is None
    assert determine_degree(CP1, 0, []) == 1
    assert determine_degree(CP1, 1, [(1, 1)]) is None


def test_metric_raise():
    assert metric_raise(POINT, 0) == [(0, 1)]
    assert metric_raise(CP1, 0) == [(1, 1)]
    assert metric_raise(CP1, 1) == [(0, 1)]


@pytest.mark.parametrize("theory", [POINT, CP1])
def test_raise_then_lower_is_identity(theory):
    for a in range(theory.size):
        back = {}
        for b, c in metric_raise(theory, a):
            for d, e in metric_lower(theory, b):
                back[d] = back.get(d, 0) + c * e
        assert {k: v for k, v in back.items() if v} == {a: 1}


def test_pairing_must_be_symmetric():
    with pytest.raises(ValueError):
        TheorySpec("bad", (0, 1), ((0, 1), (2, 0)), True)


@pytest.mark.parametrize("theory", [POINT, CP1])
def test_seed_degrees_match(theory):
    for (g, d, ins), v in load_seed_table(theory).items():
        if v:
            assert determine_degree(theory, g, ins) == d


def test_degree_permutation_invariant():
    rng = random.Random(3)
    for _ in range(100):
        ins = [(rng.randint(0, 6), rng.randint(0, 1)) for _ in range(rng.randint(1, 4))]
        g = rng.randint(0, 3)
        ref = determine_degree(CP1, g, ins)
        for perm in itertools.permutations(ins):
            assert determine_degree(CP1, g, perm) == ref


def test_key_canonical_order():
    a = CorrelatorKey(CP1, 2, [(4, 0), (1, 1)], 1)
    b = CorrelatorKey(CP1, 2, [(1, 1), (4, 0)], 1)
    assert a == b and str(a) == "<tau_1,1 tau_4,0>_2,1"
    with pytest.raises(ValueError):
        CorrelatorKey(POINT, 1, [(1, 0)], 1)


def test_theory_lookup():
    assert theory_by_name("CP1") is CP1
    with pytest.raises(ValueError):
        theory_by_name("quintic")
    with pytest.raises(ValueError):
        CP1.check(Insertion(0, 2))
