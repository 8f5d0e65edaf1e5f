import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from g3trr.ansatz import Deriver, assemble_system, load_manifest
from g3trr.oracle import make_oracle
from g3trr.theory import CP1, POINT

DATA = Path(__file__).parent / "data"

# the coefficients a_2 .. a_30 as published alongside the relation
REFERENCE = dict(zip(range(2, 31), map(Fraction, """
    -1/252 13/168 41/21 -13/168 1/280 -23/5040 -47/5040 -5/1008 23/504 11/140
    -4/35 2/105 89/210 -1/210 1/140 23/140 -3/140 -1/4480 13/8064 -1/2240
    41/6720 1/53760 -1/210 -1/5760 -1/2688 -1/5040 5/42 1/3780 1/252
    """.split())))


def load_printed():
    out = []
    for rec in json.loads((DATA / "printed_relations.json").read_text()):
        eq = {0: Fraction(rec["constant"])}
        eq.update({int(k[1:]): Fraction(v) for k, v in rec["coefficients"].items()})
        out.append({k: v for k, v in eq.items() if v})
    return out


@pytest.fixture(scope="session")
def printed():
    return load_printed()


@pytest.fixture(scope="session")
def manifest():
    return load_manifest()


@pytest.fixture(scope="session")
def deriver():
    return Deriver()


@pytest.fixture(scope="session")
def system(manifest, deriver):
    return assemble_system(manifest, deriver)


@pytest.fixture(scope="session")
def solution(system):
    return system.solve()


@pytest.fixture(scope="session")
def point_oracle():
    return make_oracle(POINT)


@pytest.fixture(scope="session")
def cp1_oracle():
    return make_oracle(CP1)


@pytest.fixture(scope="session")
def cp1_seed_oracle():
    return make_oracle(CP1, recursive=False)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(n))
