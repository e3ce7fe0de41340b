"""Automata-style diagnostics on flows and the executable counterexamples.

Deadlock and unreachability are not defined formally for flows; the readings
used here are the usual automata ones:

* unreachable: no generator path from any initial state;
* deadlock: a state with no outgoing path that is not an intended terminal,
  i.e. it is unreachable, or designated final states were supplied and it is
  not one of them.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Sequence, Union

from .colimits import codiagonal_construction, pushout
from .finset import FinSet, map_C, map_C_plus, map_R
from .flows import (Flow, FlowMorphism, FlowPresentation, directed_segment, enumerate_morphisms, phi,
                    segment_squared)
from .lifting import has_llp
from .serialize import arrow_summary


@dataclass
class DihomotopyReport:
    initial: list[str]
    final: list[str]
    unreachable: list[str]
    deadlocks: list[str]
    loops: list[list[str]] = field(default_factory=list)
    branchings: list[dict] = field(default_factory=list)
    mergings: list[dict] = field(default_factory=list)
    truncated: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _generators(X: Union[Flow, FlowPresentation]) -> tuple[list[str], list[tuple[str, str, str]]]:
    """States and generator edges as (label, source, target)."""
    if isinstance(X, FlowPresentation):
        return list(X.vertices), list(X.edges)
    return list(X.states), [(p[2], p[0], p[1]) for p in X.indecomposable_paths()]


def _reachable(starts, edges) -> set[str]:
    out: dict[str, list[str]] = {}
    for _, s, t in edges:
        out.setdefault(s, []).append(t)
    seen, todo = set(starts), list(starts)
    while todo:
        v = todo.pop()
        for w in out.get(v, []):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def analyze(X: Union[Flow, FlowPresentation], designated_finals: Sequence[str] | None = None) -> DihomotopyReport:
    states, edges = _generators(X)
    sources = {e[1] for e in edges}
    targets = {e[2] for e in edges}
    if isinstance(X, Flow):
        sources |= {p[0] for p in X.paths}
        targets |= {p[1] for p in X.paths}
    initial = [s for s in states if s not in targets]
    final = [s for s in states if s not in sources]
    if isinstance(X, Flow):
        reach = _reachable(initial, [(p[2], p[0], p[1]) for p in X.paths])
    else:
        reach = _reachable(initial, edges)
    unreachable = [s for s in states if s not in reach]
    deadlocks = []
    for s in final:
        if s in unreachable or (designated_finals is not None and s not in designated_finals):
            deadlocks.append(s)

    loops: list[list[str]] = []
    if isinstance(X, FlowPresentation):
        cycle = X.find_cycle()
        if cycle:
            loops.append([e[0] for e in cycle])
    else:
        loops = [[p[2]] for p in X.paths if p[0] == p[1]]

    branchings, mergings = [], []
    for s in states:
        outs = sorted(e[0] for e in edges if e[1] == s)
        ins = sorted(e[0] for e in edges if e[2] == s)
        if len(outs) >= 2:
            branchings.append({"state": s, "paths": outs})
        if len(ins) >= 2:
            mergings.append({"state": s, "paths": ins})
    truncated = isinstance(X, Flow) and X.truncated
    return DihomotopyReport(initial, final, unreachable, deadlocks, loops, branchings, mergings, truncated)


def is_discrete_weq(f: FlowMorphism) -> bool:
    """Bijective on states and on every path set P_{a,b} (weak S-homotopy equivalence
    with discrete path spaces)."""
    return f.is_bijective()


# ---------------------------------------------------------------------------
# counterexamples


def identify_states(X: Flow, a: str, b: str):
    """Pushout of R: {0,1} → {0} along ι: {0,1} → X, ι(0) = a, ι(1) = b."""
    two = Flow.from_set(FinSet.standard(2))
    iota = FlowMorphism(two, X, (a, b))
    return pushout(FlowMorphism.from_set_map(map_R()), iota)


def _damage(X: Flow, a: str, b: str) -> dict:
    po = identify_states(X, a, b)
    merged = len(po.apex.vertices) < len(X.states)
    report = analyze(po.apex)
    return {"flow_states": list(X.states), "identified": [a, b],
            "states_after": list(po.apex.vertices), "non_trivial": merged,
            "loops": report.loops, "branchings": report.branchings, "mergings": report.mergings,
            "initial_before": X.initial_states(), "initial_after": report.initial,
            "final_before": X.final_states(), "final_after": report.final}


def small_flows(max_states: int = 2, max_paths: int = 1) -> list[Flow]:
    """Every flow on {0..k-1}, k ≤ max_states, with at most one path (max_paths ≤ 1).

    A single loop p at a state must be idempotent (p*p = p) to stay finite.
    """
    if max_paths > 1:
        raise ValueError("only flows with at most one path are enumerated")
    flows = []
    for k in range(max_states + 1):
        S = FinSet.standard(k)
        flows.append(Flow(S))
        if max_paths == 0:
            continue
        for a, b in itertools.product(S, repeat=2):
            p = (a, b, "p")
            comp = ((p, p, p),) if a == b else ()
            flows.append(Flow(S, (p,), comp))
    return flows


def trivial_fibration_sweep(max_states: int = 2, max_paths: int = 1) -> dict:
    """Every morphism with the RLP against R and C has a bijective state map."""
    R, C = map_R(), map_C()
    flows = small_flows(max_states, max_paths)
    checked = lifting = 0
    violations = []
    for X in flows:
        for Y in flows:
            for g in enumerate_morphisms(X, Y):
                checked += 1
                if has_llp(R, g) and has_llp(C, g):
                    lifting += 1
                    if not g.state_map.is_bijective():
                        violations.append(repr(g))
    return {"flows": len(flows), "morphisms": checked, "with_rlp": lifting, "violations": violations}


def counterexample_suite() -> dict:
    I, II, f = directed_segment(), segment_squared(), phi()
    sizes = [len(I.states), len(II.states)]
    a = {"segment_states": sizes[0], "subdivided_states": sizes[1],
         "phi_is_discrete_weq": is_discrete_weq(f),
         "phi_state_map_bijective": f.state_map.is_bijective(),
         "ok": sizes == [2, 3] and not is_discrete_weq(f)}

    coprod = pushout(FlowMorphism(Flow(FinSet(())), I, ()), FlowMorphism(Flow(FinSet(())), I, ()))
    IplusI, _, _ = coprod.materialize()
    b = {"loop": _damage(I, "0", "1"),
         "merging": _damage(IplusI, "1", "1'"),
         "branching": _damage(IplusI, "0", "0'")}
    b["ok"] = (all(v["non_trivial"] for v in b.values())
               and bool(b["loop"]["loops"]) and bool(b["merging"]["mergings"])
               and bool(b["branching"]["branchings"]))

    cd = codiagonal_construction(map_C_plus())
    h0 = cd.h.state_map
    c = {"apex_states": list(cd.apex.states), "h0": arrow_summary(h0),
         "h0_surjective": h0.is_surjective(), "h0_injective": h0.is_injective(),
         "h_after_k1_is_identity": cd.h @ cd.k1 == FlowMorphism.identity(cd.h.target),
         "h_after_k2_is_identity": cd.h @ cd.k2 == FlowMorphism.identity(cd.h.target)}
    c["ok"] = c["h0_surjective"] and not c["h0_injective"] and c["h_after_k1_is_identity"]

    d = trivial_fibration_sweep()
    d["ok"] = not d["violations"] and d["with_rlp"] > 0
    return {"phi": a, "identification": b, "codiagonal": c, "trivial_fibrations": d,
            "ok": all(x["ok"] for x in (a, b, c, d))}
