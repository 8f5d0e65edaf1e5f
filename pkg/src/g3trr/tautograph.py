"""Decorated dual graphs on M_{3,1} and the translation to correlator coefficients.

A stratum coefficient ``c`` corresponds to the coefficient ``c / |Aut(G)|`` in
the correlator form of the relation.  Automorphisms are counted on
half-edges: a permutation of vertices preserving genera together with a
permutation of half-edges compatible with incidence and with the edge
involution, fixing the leg and mapping psi-decorated flags to psi-decorated
flags.  A self-loop flip and a permutation of parallel edges both count.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import permutations
from pathlib import Path
from typing import Mapping, Sequence

from .exactq import fmt_q, parse_q

LEG = "leg"


class UnstableGraph(ValueError):
    pass


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[int, ...]             # genus of each vertex
    edges: tuple[tuple[int, int], ...]
    leg: int
    psi: frozenset = frozenset()          # flags: (edge_index, side) or LEG

    @classmethod
    def build(cls, vertices: Sequence[int], edges: Sequence, leg: int, psi=()) -> "DualGraph":
        es = tuple((int(u), int(v)) for u, v in edges)
        flags = set()
        for item in psi:
            if isinstance(item, Mapping):
                vtx, e = item["vertex"], item.get("edge_index", LEG)
            else:
                vtx, e = item
            if e == LEG:
                if vtx != leg:
                    raise UnstableGraph(f"psi on the leg must sit at vertex {leg}")
                flags.add(LEG)
                continue
            u, v = es[e]
            if vtx == u:
                flags.add((e, 0))
            elif vtx == v:
                flags.add((e, 1))
            else:
                raise UnstableGraph(f"edge {e} is not incident to vertex {vtx}")
        return cls(tuple(vertices), es, leg, frozenset(flags))

    @classmethod
    def from_record(cls, rec: Mapping) -> "DualGraph":
        return cls.build(rec["vertices"], rec["edges"], rec["leg"], rec.get("psi", ()))

    def to_record(self) -> dict:
        psi = []
        for f in sorted(self.psi, key=str):
            if f == LEG:
                psi.append({"vertex": self.leg, "edge_index": LEG})
            else:
                e, side = f
                psi.append({"vertex": self.edges[e][side], "edge_index": e})
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges],
                "leg": self.leg, "psi": psi}

    def valence(self, v: int) -> int:
        return (sum((a == v) + (b == v) for a, b in self.edges)
                + (self.leg == v))

    @property
    def betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def genus(self) -> int:
        return sum(self.vertices) + self.betti

    def connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for a, b in self.edges:
                for y, z in ((a, b), (b, a)):
                    if y == x and z not in seen:
                        seen.add(z)
                        stack.append(z)
        return len(seen) == len(self.vertices)

    def check(self, genus: int | None = None) -> None:
        n = len(self.vertices)
        if not n or not 0 <= self.leg < n:
            raise UnstableGraph("leg must sit on a vertex")
        if any(not (0 <= a < n and 0 <= b < n) for a, b in self.edges):
            raise UnstableGraph("edge endpoint out of range")
        if not self.connected():
            raise UnstableGraph("graph is disconnected")
        for v, g in enumerate(self.vertices):
            if g < 0 or (g == 0 and self.valence(v) < 3) or (g == 1 and self.valence(v) < 1):
                raise UnstableGraph(f"vertex {v} of genus {g} has valence {self.valence(v)}")
        if genus is not None and self.genus != genus:
            raise UnstableGraph(f"total genus {self.genus}, expected {genus}")


def automorphism_order(g: DualGraph) -> int:
    g.check()
    n = len(g.vertices)
    total = 0
    for sigma in permutations(range(n)):
        if sigma[g.leg] != g.leg:
            continue
        if any(g.vertices[sigma[v]] != g.vertices[v] for v in range(n)):
            continue
        total += _edge_maps(g, sigma)
    return total


def _edge_maps(g: DualGraph, sigma) -> int:
    m = len(g.edges)
    used = [False] * m

    def rec(i):
        if i == m:
            return 1
        a, b = g.edges[i]
        count = 0
        for j in range(m):
            if used[j]:
                continue
            for flip in (0, 1):
                c, d = g.edges[j] if not flip else g.edges[j][::-1]
                if (sigma[a], sigma[b]) != (c, d):
                    continue
                if ((i, 0) in g.psi) != ((j, flip) in g.psi):
                    continue
                if ((i, 1) in g.psi) != ((j, 1 - flip) in g.psi):
                    continue
                used[j] = True
                count += rec(i + 1)
                used[j] = False
        return count

    return rec(0)


@dataclass
class GraphRelation:
    entries: list[tuple[DualGraph, Fraction]]

    def __len__(self):
        return len(self.entries)


def load_graphs(path: str | Path | None = None, genus: int = 3) -> GraphRelation:
    if path is None:
        text = resources.files("g3trr").joinpath("data").joinpath("graphs.json").read_text()
    else:
        text = Path(path).read_text()
    entries = []
    for rec in json.loads(text):
        g = DualGraph.from_record(rec)
        g.check(genus)
        entries.append((g, parse_q(str(rec["coefficient"]))))
    return GraphRelation(entries)


def load_pairing(path: str | Path | None = None) -> dict[int, int]:
    """``{graph index (1-based): unknown index}``."""
    if path is None:
        text = resources.files("g3trr").joinpath("data").joinpath("graph_pairing.json").read_text()
    else:
        text = Path(path).read_text()
    return {int(k): int(v) for k, v in json.loads(text).items()}


@dataclass
class TranslationReport:
    rows: list[dict] = field(default_factory=list)
    multiset_ok: bool = False
    order_mismatches: list[int] = field(default_factory=list)
    pair_mismatches: list[int] = field(default_factory=list)
    paired: bool = False

    @property
    def ok(self) -> bool:
        return self.multiset_ok and not (self.paired and self.pair_mismatches)

    def to_record(self) -> dict:
        return {"graphs": self.rows, "multiset_match": self.multiset_ok,
                "paired": self.paired, "pair_mismatches": self.pair_mismatches,
                "printed_order_mismatches": self.order_mismatches}


def translate_and_match(rel: GraphRelation, coeffs: Mapping[int, Fraction],
                        pairing: Mapping[int, int] | None = None) -> TranslationReport:
    """Divide each coefficient by |Aut| and compare with ``a_2 .. a_30``.

    Without ``pairing`` the graphs are compared in printed order against
    ``a_2, a_3, ...`` (mismatches only reported) and the multiset decides.
    """
    targets = [coeffs[i] for i in range(2, 31)]
    rep = TranslationReport(paired=pairing is not None)
    ratios = []
    for idx, (g, c) in enumerate(rel.entries, 1):
        aut = automorphism_order(g)
        ratio = c / aut
        ratios.append(ratio)
        row = {"graph": idx, "coefficient": fmt_q(c), "aut": aut, "ratio": fmt_q(ratio)}
        if pairing is not None:
            u = pairing.get(idx)
            row["unknown"] = f"a_{u}" if u is not None else None
            if u is None or coeffs.get(u) != ratio:
                rep.pair_mismatches.append(idx)
        elif idx - 1 < len(targets) and targets[idx - 1] != ratio:
            rep.order_mismatches.append(idx)
        rep.rows.append(row)
    rep.multiset_ok = Counter(ratios) == Counter(targets)
    return rep
