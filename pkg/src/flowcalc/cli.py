"""Command-line front end.

Exit status: 0 success/pass, 1 verification failure (witnesses in the
report), 2 usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dihomotopy, wfs
from .colimits import pushout
from .finset import MapClass, SetMap, classify_map, enumerate_universe, map_C, map_C_plus, map_R
from .flows import (BudgetExceeded, Flow, FlowPresentation, InfinitePathSet, directed_segment, materialize,
                    phi, segment_squared)
from .lifting import find_filler, lifting_witness
from .serialize import (DocumentError, arrow_summary, dumps, flow_from_json, flow_to_json,
                        morphism_from_json, morphism_to_json, presentation_to_json)

BUILTIN_ARROWS = {"R": map_R, "C": map_C, "C+": map_C_plus, "phi": phi}
BUILTIN_FLOWS = {"I": directed_segment, "I*I": segment_squared}


class UsageError(Exception):
    pass


def _load_json(ref: str):
    try:
        return json.loads(Path(ref).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"no such file or built-in object: {ref}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{ref}: invalid JSON ({exc})") from None


def load_arrow(ref: str):
    if ref in BUILTIN_ARROWS:
        return BUILTIN_ARROWS[ref]()
    return morphism_from_json(_load_json(ref))


def load_flow(ref: str):
    if ref in BUILTIN_FLOWS:
        return BUILTIN_FLOWS[ref]()
    return flow_from_json(_load_json(ref))


def _emit(args, payload: dict, lines: list[str]):
    if args.json:
        sys.stdout.write(dumps(payload))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify_map(args) -> int:
    f = load_arrow(args.map)
    if not isinstance(f, SetMap):
        raise UsageError("classify-map expects a set map")
    tags = sorted(t.value for t in classify_map(f))
    _emit(args, {"map": morphism_to_json(f), "classes": tags},
          [f"{arrow_summary(f)}", "classes: " + ", ".join(tags)])
    return 0


def cmd_lift(args) -> int:
    i, p = load_arrow(args.left), load_arrow(args.right)
    sq = lifting_witness(i, p)
    if sq is None:
        _emit(args, {"llp": True}, [f"{args.left} ⧄ {args.right}: every square has a filler"])
        return 0
    payload = {"llp": False, "witness": {"top": morphism_to_json(sq.top), "bottom": morphism_to_json(sq.bottom)}}
    _emit(args, payload, [f"{args.left} does not lift against {args.right}",
                          f"  top:    {arrow_summary(sq.top)}",
                          f"  bottom: {arrow_summary(sq.bottom)}",
                          f"  filler: {find_filler(sq)}"])
    return 1


def cmd_pushout(args) -> int:
    po = pushout(load_arrow(args.f), load_arrow(args.g))
    if not args.materialize:
        doc = presentation_to_json(po.apex)
        _emit(args, {"apex": doc}, [dumps(doc).rstrip()])
        return 0
    try:
        apex, _, _ = po.materialize(args.max_len)
    except InfinitePathSet as exc:
        _emit(args, {"infinite": True, "cycle": [list(e) for e in exc.cycle]}, [str(exc)])
        return 1
    doc = flow_to_json(apex)
    _emit(args, {"apex": doc}, [dumps(doc).rstrip()])
    return 0


def cmd_materialize(args) -> int:
    X = load_flow(args.flow)
    if isinstance(X, Flow):
        doc = flow_to_json(X)
        _emit(args, {"flow": doc}, [dumps(doc).rstrip()])
        return 0
    try:
        flow = materialize(X, args.max_len)
    except InfinitePathSet as exc:
        _emit(args, {"infinite": True, "cycle": [list(e) for e in exc.cycle]}, [str(exc)])
        return 1
    doc = flow_to_json(flow)
    _emit(args, {"flow": doc}, [dumps(doc).rstrip()])
    return 0


def cmd_factorize(args) -> int:
    f = load_arrow(args.map)
    if args.pair:
        if not isinstance(f, SetMap):
            raise UsageError("canonical factorizations are defined for set maps")
        l, r = wfs.canonical_factorization(f, args.pair)
        stages = None
    else:
        K = [load_arrow(k.strip()) for k in args.generators.split(",") if k.strip()]
        try:
            res = wfs.soa_factorize(f, K, max_stages=args.stages)
        except BudgetExceeded as exc:
            _emit(args, {"error": str(exc)}, [str(exc)])
            return 1
        l, r, stages = res.left, res.right, res.stages
    payload = {"left": morphism_to_json(l), "right": morphism_to_json(r), "stages": stages}
    _emit(args, payload, [f"l = {arrow_summary(l)}", f"r = {arrow_summary(r)}"]
          + ([f"stages = {stages}"] if stages is not None else []))
    return 0


def _pair_classes(args):
    if args.pair:
        L, R = wfs.resolve_pair(args.pair)
        return L, R, args.pair
    if not (args.left and args.right):
        raise UsageError("give --pair or both --left and --right")
    L, R = MapClass.parse(args.left), MapClass.parse(args.right)
    return L, R, None


def cmd_verify_wfs(args) -> int:
    L, R, _ = _pair_classes(args)
    report = wfs.verify_wfs(L, R, enumerate_universe(args.universe_max))
    status = "pass" if report.passed else "fail"
    lines = [f"{report.name} at universe-max {report.bound}: {status}"]
    lines += [f"  [{w['check']}] {w['reason']}: {w['arrow']}" for w in report.witnesses]
    _emit(args, report.to_dict(), lines)
    return 0 if report.passed else 1


def cmd_verify_model_structures(args) -> int:
    if args.triple:
        parts = [x.strip() for x in args.triple.split(";")]
        if len(parts) != 3:
            raise UsageError("--triple takes 'Cof;Fib;W'")
        specs = [wfs.ModelStructureSpec(*(MapClass.parse(x) for x in parts))]
    else:
        specs = wfs.NINE_MODEL_STRUCTURES
    U = enumerate_universe(args.universe_max)
    reports = [wfs.verify_model_structure(s, U) for s in specs]
    lines = [f"{r.name}: {'pass' if r.passed else 'fail'}" for r in reports]
    for r in reports:
        if r.two_of_three:
            lines.append(f"  {r.name} two-out-of-three: {r.two_of_three}")
        for sub in (r.trivial_cofibrations, r.cofibrations):
            lines += [f"  {sub.name} [{w['check']}] {w['reason']}: {w['arrow']}" for w in sub.witnesses]
    ok = all(r.passed for r in reports)
    _emit(args, {"passed": ok, "structures": [r.to_dict() for r in reports]}, lines)
    return 0 if ok else 1


def cmd_analyze(args) -> int:
    X = load_flow(args.flow)
    if isinstance(X, FlowPresentation) and args.max_len is not None:
        X = materialize(X, args.max_len)
    finals = args.finals.split(",") if args.finals else None
    rep = dihomotopy.analyze(X, finals)
    d = rep.to_dict()
    _emit(args, d, [f"{k}: {v}" for k, v in d.items()])
    return 0


def cmd_counterexamples(args) -> int:
    rep = dihomotopy.counterexample_suite()
    a, b, c, d = rep["phi"], rep["identification"], rep["codiagonal"], rep["trivial_fibrations"]
    lines = [
        f"phi skeleton sizes: ({a['segment_states']}, {a['subdivided_states']}); "
        f"discrete weak equivalence: {a['phi_is_discrete_weq']}",
        f"identifying the ends of I: loops {b['loop']['loops']}",
        f"identifying the finals of I+I: mergings {b['merging']['mergings']}",
        f"identifying the initials of I+I: branchings {b['branching']['branchings']}",
        f"codiagonal of C+: h0 = {c['h0']} (surjective {c['h0_surjective']}, injective {c['h0_injective']})",
        f"RLP against R and C: {d['with_rlp']} of {d['morphisms']} morphisms, "
        f"{len(d['violations'])} with non-bijective state map",
        "all checks: " + ("pass" if rep["ok"] else "fail"),
    ]
    _emit(args, rep, lines)
    return 0 if rep["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--budget", type=int, help="hom-set enumeration cap (candidate assignments)")
    common.add_argument("--universe-max", type=int, default=4, help="cardinality bound of the arrow universe")
    common.add_argument("--max-len", type=int, help="word-length bound when materializing cyclic presentations")

    parser = argparse.ArgumentParser(prog="flowcalc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify-map", parents=[common])
    p.add_argument("map")
    p.set_defaults(func=cmd_classify_map)

    p = sub.add_parser("lift", parents=[common])
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("pushout", parents=[common])
    p.add_argument("--f", required=True, help="span leg Z → X")
    p.add_argument("--g", required=True, help="span leg Z → Y")
    p.add_argument("--materialize", action="store_true")
    p.set_defaults(func=cmd_pushout)

    p = sub.add_parser("materialize", parents=[common])
    p.add_argument("flow")
    p.set_defaults(func=cmd_materialize)

    p = sub.add_parser("factorize", parents=[common])
    p.add_argument("map")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pair", help="named weak factorization system, e.g. mono-epi")
    g.add_argument("--generators", help="comma separated K for the small object argument, e.g. R,C")
    p.add_argument("--stages", type=int, default=wfs.DEFAULT_STAGE_CAP)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("verify-wfs", parents=[common])
    p.add_argument("--pair", help="one of: " + ", ".join(wfs.NAMED_PAIRS))
    p.add_argument("--left", help="class expression, e.g. 'Epi|Empty'")
    p.add_argument("--right")
    p.set_defaults(func=cmd_verify_wfs)

    p = sub.add_parser("verify-model-structures", parents=[common])
    p.add_argument("--triple", help="'Cof;Fib;W' instead of the nine known structures")
    p.set_defaults(func=cmd_verify_model_structures)

    p = sub.add_parser("analyze", parents=[common])
    p.add_argument("flow")
    p.add_argument("--finals", help="comma separated designated final states")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("counterexamples", parents=[common])
    p.set_defaults(func=cmd_counterexamples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is not None:
        os.environ["FLOWCALC_BUDGET"] = str(args.budget)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"flowcalc: search budget exceeded: {exc}", file=sys.stderr)
        return 1
    except (UsageError, DocumentError, wfs.UnknownWfs, ValueError) as exc:
        print(f"flowcalc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
