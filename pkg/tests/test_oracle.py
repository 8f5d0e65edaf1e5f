import json
import random
from fractions import Fraction

import pytest

from g3trr.oracle import (SEED_DIR_ENV, ConflictingSeed, InvalidKey, IrreducibleCorrelator,
                          Oracle, ParseError, WittenKontsevich, load_seed_table, make_oracle)
from g3trr.theory import CP1, POINT, CorrelatorKey, Insertion, determine_degree

F = Fraction


def test_point_seed_table():
    t = load_seed_table(POINT)
    assert len(t) == 13
    assert t[(3, 0, ((3, 0), (3, 0), (3, 0)))] == F(583, 96768)
    assert t[(2, 0, ((4, 0),))] == F(1, 1152)
    assert t[(3, 0, ((2, 0), (2, 0), (2, 0), (2, 0), (3, 0)))] == F(193, 288)


def test_cp1_seed_table():
    t = load_seed_table(CP1)
    assert t[(2, 1, ((5, 0),))] == F(1, 576)
    assert t[(2, 0, ((1, 1), (1, 1)))] == 0
    assert t[(0, 1, ())] == 1
    assert t[(1, 0, ())] == 0


def test_axiom_values(point_oracle, cp1_seed_oracle):
    assert point_oracle(0, [(0, 0)] * 3) == 1
    assert point_oracle(1, [(1, 0)]) == F(1, 24)
    assert point_oracle(2, [(2, 0)]) == 0
    assert cp1_seed_oracle(1, [(0, 1)], 0) == F(-1, 24)
    assert cp1_seed_oracle(0, [(0, 1), (0, 1)], 1) == 1
    assert cp1_seed_oracle(1, [(1, 0)], 0) == F(1, 12)
    assert cp1_seed_oracle(0, [(0, 0), (0, 0), (0, 1)], 0) == 1
    assert cp1_seed_oracle(0, [(0, 0), (0, 0), (0, 0)], 0) == 0


def test_derived_point_value(point_oracle):
    # string then dilaton: <tau_0 tau_1 tau_8>_3 = <tau_0 tau_7>_3 ... down to the seed
    assert point_oracle(3, [(0, 0), (8, 0)]) == F(1, 82944)
    assert point_oracle(3, [(1, 0), (7, 0)]) == 5 * F(1, 82944)


def test_wrong_degree_is_zero(cp1_seed_oracle):
    assert cp1_seed_oracle(2, [(5, 0)], 0) == 0
    assert cp1_seed_oracle(2, [(5, 0)], 1) == F(1, 576)


def test_negative_level_is_zero(point_oracle):
    assert point_oracle.value(1, ((-1, 0), (2, 0))) == 0


def test_irreducible_raises():
    o = make_oracle(POINT)
    with pytest.raises(IrreducibleCorrelator) as e:
        o(4, [(10, 0)])
    assert e.value.key == CorrelatorKey(POINT, 4, [(10, 0)])


def test_invalid_keys(point_oracle):
    with pytest.raises(InvalidKey):
        point_oracle(-1, [(0, 0)])
    with pytest.raises(InvalidKey):
        point_oracle(1, [(0, 1)])
    with pytest.raises(InvalidKey):
        point_oracle(1, [(1, 0)], 2)


def _closure_keys(theory, oracle, n, seed):
    """Random keys in the seed closure: seeds padded with removable insertions."""
    rng = random.Random(seed)
    removable = [(0, 0), (1, 0)] + ([(0, 1)] if theory is CP1 else [])
    seeds = sorted(oracle.seeds)
    out = []
    while len(out) < n:
        g, d, ins = rng.choice(seeds)
        extra = [rng.choice(removable) for _ in range(rng.randint(1, 3))]
        # occasionally raise a level so string reductions have somewhere to land
        ins = list(ins) + extra
        if ins and rng.random() < 0.5:
            j = rng.randrange(len(ins))
            ins[j] = Insertion(ins[j][0] + 1, ins[j][1])
        dd = determine_degree(theory, g, ins)
        key = CorrelatorKey(theory, g, ins, dd if dd is not None else d)
        try:
            oracle.evaluate(key)
        except IrreducibleCorrelator:
            continue
        out.append(key)
    return out


@pytest.mark.parametrize("theory", [POINT, CP1])
def test_order_independence(theory):
    oracle = make_oracle(theory, recursive=False)
    keys = _closure_keys(theory, oracle, 150, seed=11)
    rng = random.Random(5)
    nonzero = 0
    for key in keys:
        ref = oracle.evaluate(key)
        nonzero += bool(ref)
        for _ in range(3):
            assert oracle.evaluate_in_order(key, rng) == ref, key
    assert nonzero > 20


@pytest.mark.parametrize("theory", [POINT, CP1])
def test_seed_round_trip(theory):
    # no seed holds a removable insertion, so pad each one with the dilaton
    # field and check <tau_1 X>_g = (2g - 2 + k) <X>_g under random orders
    table = load_seed_table(theory)
    oracle = Oracle(theory, table)
    rng = random.Random(2)
    assert not any(oracle.is_reducible(g, ins) for g, _, ins in table)
    for (g, d, ins), v in table.items():
        key = CorrelatorKey(theory, g, ins, d)
        assert oracle.evaluate_in_order(key, rng) == v
        k = len(ins)
        if 2 * g - 2 + k <= 0:
            continue
        padded = CorrelatorKey(theory, g, ins + ((1, 0),), d)
        assert oracle.evaluate_in_order(padded, rng) == (2 * g - 2 + k) * v
        twice = CorrelatorKey(theory, g, ins + ((1, 0), (1, 0)), d)
        assert oracle.evaluate_in_order(twice, rng) == (2 * g - 2 + k) * (2 * g - 1 + k) * v


def test_memo_is_stable(point_oracle):
    key = CorrelatorKey(POINT, 3, [(0, 0), (1, 0), (2, 0), (6, 0)])
    first = point_oracle.evaluate(key)
    assert all(point_oracle.evaluate(key) == first for _ in range(3))


def test_witten_kontsevich_agrees_with_point_seeds():
    wk = WittenKontsevich()
    assert wk.agrees_with(load_seed_table(POINT)) == []
    assert wk.value(0, (0, 0, 0)) == 1
    assert wk.value(1, (1,)) == F(1, 24)
    assert wk.value(2, (4,)) == F(1, 1152)
    assert wk.value(3, (2,) * 6) == F(1225, 144)


def test_recursive_point_backend_extends_closure():
    o = make_oracle(POINT, recursive=True)
    assert o(4, [(10, 0)]) == F(1, 7962624)


def _write(path, records):
    path.write_text(json.dumps(records))
    return path


def test_override_extends_and_conflicts(tmp_path):
    extra = _write(tmp_path / "x.json", [{"genus": 4, "insertions": [[10, 0]], "value": "1/7962624"}])
    t = load_seed_table(POINT, extra)
    assert t[(4, 0, ((10, 0),))] == F(1, 7962624)
    bad = _write(tmp_path / "y.json", [{"genus": 2, "insertions": [4], "value": "1/1000"}])
    with pytest.raises(ConflictingSeed):
        load_seed_table(POINT, bad)
    assert load_seed_table(POINT, bad, allow_replace=True)[(2, 0, ((4, 0),))] == F(1, 1000)
    same = _write(tmp_path / "z.json", [{"genus": 2, "insertions": [4], "value": "1/1152"}])
    assert len(load_seed_table(POINT, same)) == 13


@pytest.mark.parametrize("text", ['{"genus": 1}', '[{"genus": 1}]', 'not json',
                                  '[{"genus": 2, "insertions": [4], "value": "0.5"}]'])
def test_parse_errors(tmp_path, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    with pytest.raises(ParseError):
        load_seed_table(POINT, p)


def test_seed_dir_env(tmp_path, monkeypatch):
    _write(tmp_path / "point_seeds.json", [{"genus": 2, "insertions": [4], "value": "1/1152"}])
    monkeypatch.setenv(SEED_DIR_ENV, str(tmp_path))
    assert load_seed_table(POINT) == {(2, 0, ((4, 0),)): F(1, 1152)}
