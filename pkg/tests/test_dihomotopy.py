import itertools
import random

import pytest

from flowcalc.colimits import coproduct
from flowcalc.dihomotopy import (analyze, counterexample_suite, identify_states, is_discrete_weq, small_flows,
                                 trivial_fibration_sweep)
from flowcalc.finset import FinSet, map_R
from flowcalc.flows import (Flow, FlowMorphism, FlowPresentation, directed_segment, enumerate_morphisms, glob_map,
                            materialize, phi, segment_squared)

from flowgen import random_flow


def I_plus_I():
    return coproduct(directed_segment(), directed_segment()).materialize()[0]


def test_analyze_segment_squared():
    rep = analyze(segment_squared())
    assert rep.initial == ["0"] and rep.final == ["2"]
    assert rep.loops == [] and rep.unreachable == [] and rep.deadlocks == []
    # the composite is not a generator, so no branching at 0
    assert rep.branchings == [] and rep.mergings == []


def test_gluing_ends_reports_loop():
    po = identify_states(directed_segment(), "0", "1")
    rep = analyze(po.apex)
    assert rep.loops == [["[0,1]"]]
    assert rep.initial == [] and rep.final == []


def test_gluing_finals_reports_merging():
    X = I_plus_I()
    po = identify_states(X, "1", "1'")
    rep = analyze(po.apex)
    glued = po.vertex_leg2["1"]
    assert po.vertex_leg2["1'"] == glued
    assert rep.mergings == [{"state": glued, "paths": ["[0,1]", "[0,1]'"]}]
    assert rep.loops == []


def test_gluing_initials_reports_branching():
    rep = analyze(identify_states(I_plus_I(), "0", "0'").apex)
    assert rep.branchings and rep.branchings[0]["state"] == "0"


def test_unreachable_and_deadlock():
    # 0 → 1, plus a cycle-free island 2 → 3 and a lone state 4 that is both initial and final
    X = Flow.build("01234", {("0", "1"): ["a"], ("2", "3"): ["b"]})
    rep = analyze(X)
    assert rep.initial == ["0", "2", "4"] and rep.final == ["1", "3", "4"]
    assert rep.unreachable == [] and rep.deadlocks == []
    rep = analyze(X, designated_finals=["1"])
    assert rep.deadlocks == ["3", "4"]


def test_unreachable_behind_loop():
    # 0 has a self loop, so it is not initial; 1 is reached only from 0
    p = FlowPresentation(FinSet.of("0", "1", "2"), (("l", "0", "0"), ("a", "0", "1")))
    rep = analyze(p)
    assert rep.initial == ["2"] and rep.unreachable == ["0", "1"]
    assert "1" in rep.deadlocks and rep.loops == [["l"]]


def test_analyze_truncated_flag():
    p = FlowPresentation(FinSet.of("0"), (("e", "0", "0"),))
    assert analyze(materialize(p, max_len=2)).truncated


@pytest.mark.parametrize("seed", range(25))
def test_initial_final_invariant_under_relabelling(seed):
    rng = random.Random(seed)
    X = random_flow(rng)
    # rename states by reversing their labels' order
    names = {s: f"s{len(X.states) - k}" for k, s in enumerate(X.states)}
    Y = Flow(FinSet(tuple(names.values())), tuple((names[a], names[b], l) for a, b, l in X.paths),
             tuple(tuple((names[p[0]], names[p[1]], p[2]) for p in t) for t in X.composition))
    rx, ry = analyze(X), analyze(Y)
    assert sorted(names[s] for s in rx.initial) == sorted(ry.initial)
    assert sorted(names[s] for s in rx.final) == sorted(ry.final)


@pytest.mark.parametrize("seed", range(25))
def test_acyclic_flows_have_no_loops(seed):
    X = random_flow(random.Random(seed))
    if all(p[0] != p[1] for p in X.paths):
        assert analyze(X).loops == []


def test_discrete_weq():
    X = segment_squared()
    assert is_discrete_weq(FlowMorphism.identity(X))
    assert not is_discrete_weq(phi())
    assert not is_discrete_weq(glob_map(map_R()))


def test_discrete_weq_two_out_of_three():
    flows = small_flows(2, 1)
    for X, Y, Z in itertools.product(flows, repeat=3):
        for f in enumerate_morphisms(X, Y):
            for g in enumerate_morphisms(Y, Z):
                flags = [is_discrete_weq(f), is_discrete_weq(g), is_discrete_weq(g @ f)]
                assert sum(flags) != 2


def test_small_flows():
    flows = small_flows(2, 1)
    assert len(flows) == 8
    with pytest.raises(ValueError):
        small_flows(2, 2)


def test_trivial_fibration_sweep():
    rep = trivial_fibration_sweep()
    assert rep["morphisms"] == 65 and rep["with_rlp"] == 22 and rep["violations"] == []


def test_counterexample_suite():
    rep = counterexample_suite()
    assert rep["ok"]
    assert (rep["phi"]["segment_states"], rep["phi"]["subdivided_states"]) == (2, 3)
    assert rep["phi"]["phi_is_discrete_weq"] is False
    assert rep["codiagonal"]["h0_surjective"] and not rep["codiagonal"]["h0_injective"]
    assert all(rep["identification"][k]["non_trivial"] for k in ("loop", "merging", "branching"))
