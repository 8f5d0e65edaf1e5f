"""Command-line front end.

    g3trr corr point 3 2 2 2 2 3
    g3trr corr cp1 2 1 5,0
    g3trr relation --index 1
    g3trr system
    g3trr verify
    g3trr rspin --r 3 --genus 3 --points 2
    g3trr graphs

Exit status: 0 when everything checks out, 1 on a computation error, 2 when
a verification finds a nonzero residual.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .ansatz import (Deriver, ManifestEntry, Sweep, assemble_system, load_manifest,
                     verify_identity, verify_manifest)
from .exactq import Inconsistent, Singular, fmt_q, parse_q
from .oracle import OracleError, make_oracle
from .rspin import SpinSpec, admissible_insertions, proposition_table
from .tautograph import UnstableGraph, load_graphs, load_pairing, translate_and_match
from .theory import CP1, POINT, Insertion, determine_degree, theory_by_name

OK, COMPUTE_ERROR, VERIFY_FAILED = 0, 1, 2


class UsageError(ValueError):
    pass


def _parse_insertion(tok: str, cp1: bool) -> Insertion:
    parts = tok.replace(":", ",").split(",")
    try:
        if len(parts) == 1 and not cp1:
            return Insertion(int(parts[0]), 0)
        if len(parts) == 2:
            return Insertion(int(parts[0]), int(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"bad insertion {tok!r}; use n for the point, n,a for cp1")


def _parse_list(text: str | None, cp1: bool) -> list[Insertion]:
    if not text:
        return []
    return [_parse_insertion(t, cp1) for t in text.replace(";", " ").split()]


def _oracles(args) -> dict:
    out = {}
    for th in (POINT, CP1):
        override = getattr(args, f"{th.name}_seeds", None)
        recursive = False if args.seeds_only else None
        out[th.name] = make_oracle(th, override, recursive=recursive,
                                   allow_replace=args.replace_seeds)
    return out


def _emit(args, text_lines: list[str], record) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(record, indent=2) + "\n")
    else:
        sys.stdout.write("".join(line + "\n" for line in text_lines))


# -- commands ---------------------------------------------------------------

def cmd_corr(args) -> int:
    th = theory_by_name(args.theory)
    cp1 = th.tracks_degree
    rest = list(args.items)
    if not rest:
        raise UsageError("missing genus")
    genus = int(rest.pop(0))
    degree = None
    if cp1 and rest and "," not in rest[0] and ":" not in rest[0]:
        degree = int(rest.pop(0))
    ins = [_parse_insertion(t, cp1) for t in rest]
    if degree is None:
        degree = determine_degree(th, genus, ins) or 0
    value = _oracles(args)[th.name](genus, ins, degree)
    _emit(args, [fmt_q(value)], {"theory": th.name, "genus": genus, "degree": degree,
                                 "insertions": [list(i) for i in sorted(ins)],
                                 "value": fmt_q(value)})
    return OK


def _manifest(args):
    return load_manifest(args.manifest)


def cmd_relation(args) -> int:
    if args.index is not None:
        manifest = _manifest(args)
        if not 1 <= args.index <= len(manifest):
            raise UsageError(f"index must be in 1..{len(manifest)}")
        entry = manifest[args.index - 1]
    else:
        if args.argument is None:
            raise UsageError("give --index or --argument")
        th = theory_by_name(args.theory)
        cp1 = th.tracks_degree
        entry = ManifestEntry(th, tuple(_parse_list(args.directions, cp1)),
                              _parse_insertion(args.argument, cp1), args.degree)
    rel = Deriver(_oracles(args)).derive(entry)
    _emit(args, [rel.format()], rel.to_record())
    return OK


def cmd_system(args) -> int:
    system = assemble_system(_manifest(args), Deriver(_oracles(args)))
    sol = system.solve()
    lines = [f"a_{i} = {fmt_q(sol[i])}" for i in system.unknowns]
    _emit(args, lines, {"relations": len(system.relations),
                        "coefficients": {f"a_{i}": fmt_q(sol[i]) for i in system.unknowns}})
    return OK


def _report_record(name, rep) -> dict:
    return {"name": name, "checked": rep.checked, "nontrivial": rep.nontrivial,
            "skipped_irreducible": len(rep.skipped_irreducible),
            "failures": [{"combo": e.label(), "residual": fmt_q(r)} for e, r in rep.failures]}


def _read_coefficients(path) -> dict[int, Fraction]:
    with open(path) as fh:
        raw = json.load(fh)
    raw = raw.get("coefficients", raw)
    out = {1: Fraction(0)}
    for k, v in raw.items():
        if not k.startswith("a_"):
            raise UsageError(f"bad coefficient name {k!r}")
        out[int(k[2:])] = parse_q(str(v))
    return out


def cmd_verify(args) -> int:
    deriver = Deriver(_oracles(args))
    manifest = _manifest(args)
    if args.coefficients:
        coeffs = _read_coefficients(args.coefficients)
    else:
        coeffs = assemble_system(manifest, deriver).solve()
    parts = [("manifest", verify_manifest(manifest, coeffs, deriver))]
    theories = [POINT, CP1] if args.theory == "both" else [theory_by_name(args.theory)]
    for th in theories:
        cp1 = th.tracks_degree
        if cp1:
            dirs = _parse_list(args.cp1_directions, True)
            arguments = _parse_list(args.cp1_arguments, True)
            sweep = Sweep(th, tuple(dirs), tuple(arguments), args.cp1_max_derivatives,
                          tuple(range(args.cp1_max_degree + 1)))
        else:
            dirs = _parse_list(args.point_directions, False)
            arguments = _parse_list(args.point_arguments, False)
            sweep = Sweep(th, tuple(dirs), tuple(arguments), args.max_derivatives)
        parts.append((f"{th.name} sweep", verify_identity(sweep, coeffs, deriver)))
    records = [_report_record(n, r) for n, r in parts]
    lines = []
    for rec in records:
        lines.append(f"{rec['name']}: checked {rec['checked']}, nontrivial {rec['nontrivial']}, "
                     f"skipped {rec['skipped_irreducible']}, failures {len(rec['failures'])}")
        lines.extend(f"  FAIL {f['combo']}: residual {f['residual']}" for f in rec["failures"])
    total = sum(r.checked for _, r in parts)
    lines.append(f"reachable combos checked: {total}")
    _emit(args, lines, {"reports": records, "checked_total": total})
    return VERIFY_FAILED if any(r.failures for _, r in parts) else OK


def cmd_rspin(args) -> int:
    spec = SpinSpec(args.r)
    found = admissible_insertions(spec, args.genus, args.points)
    table = proposition_table(args.r) if args.genus == 3 else {}
    rows = []
    for c, d in found:
        v = table.get(c)
        rows.append({"correlator": str(c), "D": d,
                     "value": fmt_q(v) if v is not None else "unknown"})
    lines = [f"{r['correlator']}  D={r['D']}  {r['value']}" for r in rows]
    if not rows:
        lines = ["no admissible correlators: all vanish for dimensional reasons"]
    _emit(args, lines, {"r": args.r, "genus": args.genus, "points": args.points,
                        "admissible": rows})
    return OK


def cmd_graphs(args) -> int:
    rel = load_graphs(args.file)
    coeffs = assemble_system(_manifest(args), Deriver(_oracles(args))).solve()
    pairing = None if args.no_pairing else load_pairing(args.pairing)
    rep = translate_and_match(rel, coeffs, pairing)
    lines = []
    for row in rep.rows:
        tail = f"  {row['unknown']}" if "unknown" in row else ""
        lines.append(f"graph {row['graph']}: |Aut| = {row['aut']}  "
                     f"{row['coefficient']} / {row['aut']} = {row['ratio']}{tail}")
    lines.append(f"multiset match: {'yes' if rep.multiset_ok else 'no'}")
    if rep.paired:
        lines.append(f"pairing mismatches: {len(rep.pair_mismatches)}")
    else:
        lines.append(f"printed-order mismatches: {len(rep.order_mismatches)}")
    _emit(args, lines, rep.to_record())
    return OK if rep.ok else VERIFY_FAILED


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="g3trr", description=__doc__.split("\n")[0])
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--point-seeds", metavar="FILE", help="extra point seed records")
    p.add_argument("--cp1-seeds", metavar="FILE", help="extra CP^1 seed records")
    p.add_argument("--replace-seeds", action="store_true",
                   help="let override records replace built-in values")
    p.add_argument("--seeds-only", action="store_true",
                   help="disable the recursive backends; use the seed closure alone")
    p.add_argument("--manifest", metavar="FILE")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("corr", help="evaluate one correlator")
    s.add_argument("theory")
    s.add_argument("items", nargs="+", metavar="G [D] INSERTION")
    s.set_defaults(func=cmd_corr)

    s = sub.add_parser("relation", help="derive one linear relation")
    s.add_argument("--index", type=int, help="1-based entry of the manifest")
    s.add_argument("--theory", default="point")
    s.add_argument("--directions", default="")
    s.add_argument("--argument")
    s.add_argument("--degree", type=int, default=0)
    s.set_defaults(func=cmd_relation)

    s = sub.add_parser("system", help="solve for a_2 .. a_30")
    s.set_defaults(func=cmd_system)

    s = sub.add_parser("verify", help="check the identity with the solved coefficients")
    s.add_argument("--theory", default="both", choices=("both", "point", "cp1"))
    s.add_argument("--coefficients", metavar="FILE",
                   help="check these a_i (as written by 'system --format json') instead of solving")
    s.add_argument("--max-derivatives", type=int, default=5)
    s.add_argument("--point-directions", default="0 1 2 3")
    s.add_argument("--point-arguments", default="0 1 2 3 4")
    s.add_argument("--cp1-max-derivatives", type=int, default=2)
    s.add_argument("--cp1-max-degree", type=int, default=2)
    s.add_argument("--cp1-directions", default="0,0 0,1 1,0 1,1 2,0 2,1 3,0 3,1")
    s.add_argument("--cp1-arguments", default="0,0 0,1 1,0 1,1 2,0 2,1 3,0 3,1")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("rspin", help="admissible r-spin correlators")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--genus", type=int, default=3)
    s.add_argument("--points", type=int, default=1)
    s.set_defaults(func=cmd_rspin)

    s = sub.add_parser("graphs", help="automorphism orders and coefficient translation")
    s.add_argument("file", nargs="?")
    s.add_argument("--pairing", metavar="FILE")
    s.add_argument("--no-pairing", action="store_true",
                   help="compare in printed order and by multiset only")
    s.set_defaults(func=cmd_graphs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OracleError, Singular, Inconsistent, UnstableGraph, UsageError,
            ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(record) + "\n")
        return COMPUTE_ERROR


if __name__ == "__main__":
    sys.exit(main())
