import itertools

import pytest
from hypothesis import given, settings, strategies as st

from flowcalc.finset import EMPTY, FinSet, all_maps
from flowcalc.flows import (BudgetExceeded, Flow, FlowError, FlowMorphism, FlowPresentation, InfinitePathSet,
                            concat_globes, directed_segment, enumerate_morphisms, glob, glob_map,
                            hom_size_bound, is_isomorphic, materialize, phi, segment_squared)

from flowgen import composition_is_total_and_associative, preserves_composition

ZERO_ONE = FinSet.of("0", "1")


# -- globes -------------------------------------------------------------------

def test_glob_of_empty_is_two_points():
    G = glob(EMPTY)
    assert G.states == ZERO_ONE and G.paths == ()


def test_glob_singleton_is_segment():
    assert is_isomorphic(glob(FinSet.of("u")), directed_segment())


def test_glob_two_paths():
    G = glob(FinSet.of("a", "b"))
    assert len(G.paths) == 2 and G.path_labels("0", "1") == FinSet.of("a", "b")


def test_directed_segment():
    I = directed_segment()
    assert len(I.states) == 2 and len(I.paths) == 1
    assert I.initial_states() == ["0"] and I.final_states() == ["1"]


def test_concat_globes():
    II = concat_globes(FinSet.of("u"), FinSet.of("v"))
    assert len(II.states) == 3 and II.path_labels("0", "2") == FinSet.of("u*v")
    assert concat_globes(EMPTY, FinSet.of("t")).path_set("0", "2") == ()
    assert len(concat_globes(FinSet.of("a", "b"), FinSet.of("c")).path_set("0", "2")) == 2
    assert composition_is_total_and_associative(segment_squared())


def test_phi():
    f = phi()
    assert len(f.source.states) == 2 and len(f.target.states) == 3
    assert not f.state_map.is_surjective()
    assert f.homomorphism_violations() == []
    assert f.path(("0", "1", "[0,1]")) == ("0", "2", "[0,1]*[0,1]")


# -- validation ---------------------------------------------------------------

def test_flow_rejects_missing_composite():
    a, b = ("0", "1", "a"), ("1", "2", "b")
    with pytest.raises(FlowError):
        Flow(FinSet.standard(3), (a, b))


def test_flow_rejects_non_associative_table():
    p = ("0", "0", "p")
    q = ("0", "0", "q")
    comp = [(p, p, q), (p, q, p), (q, p, q), (q, q, q)]
    # (p*p)*q = q*q = q but p*(p*q) = p*p = q; (p*q)*p = p*p = q, p*(q*p) = p*q = p
    with pytest.raises(FlowError, match="associative"):
        Flow(FinSet.standard(1), (p, q), comp)


def test_flow_rejects_bad_endpoints():
    with pytest.raises(FlowError):
        Flow(FinSet.standard(1), (("0", "1", "a"),))
    with pytest.raises(FlowError):
        Flow(FinSet.standard(2), (("0", "1", "a"), ("0", "1", "a")))


def test_morphism_rejects_broken_composition():
    II = segment_squared()
    other = Flow(FinSet.standard(3), (("0", "1", "x"), ("1", "2", "y"), ("0", "2", "z"), ("0", "2", "w")),
                 ((("0", "1", "x"), ("1", "2", "y"), ("0", "2", "z")),))
    paths = {("0", "1", "[0,1]"): ("0", "1", "x"), ("1", "2", "[0,1]"): ("1", "2", "y"),
             ("0", "2", "[0,1]*[0,1]"): ("0", "2", "w")}
    with pytest.raises(FlowError):
        FlowMorphism.build(II, other, {"0": "0", "1": "1", "2": "2"}, paths)


# -- materialize --------------------------------------------------------------

def test_materialize_segment_squared_presentation():
    p = FlowPresentation(FinSet.standard(3), (("u", "0", "1"), ("v", "1", "2")))
    X = materialize(p)
    assert is_isomorphic(X, concat_globes(FinSet.of("u"), FinSet.of("v")))


def test_materialize_self_loop_is_infinite():
    p = FlowPresentation(FinSet.of("0"), (("e", "0", "0"),))
    with pytest.raises(InfinitePathSet) as exc:
        materialize(p)
    assert exc.value.cycle == [("e", "0", "0")]


def test_materialize_truncated_loop():
    p = FlowPresentation(FinSet.of("0"), (("e", "0", "0"),))
    X = materialize(p, max_len=3)
    assert X.truncated and [q[2] for q in X.paths] == ["e", "e*e", "e*e*e"]


def test_materialize_empty():
    X = materialize(FlowPresentation(EMPTY))
    assert X.states == EMPTY and X.paths == ()


def test_materialize_relations_identify_words():
    p = FlowPresentation(FinSet.standard(3), (("a", "0", "1"), ("b", "1", "2"), ("c", "0", "2")),
                         ((("a", "b"), ("c",)),))
    X = materialize(p)
    assert [q[2] for q in X.path_set("0", "2")] == ["c"]
    assert X.compose(("0", "1", "a"), ("1", "2", "b")) == ("0", "2", "c")


def test_relation_endpoints_checked():
    with pytest.raises(FlowError):
        FlowPresentation(FinSet.standard(3), (("a", "0", "1"), ("b", "1", "2")), ((("a",), ("b",)),))


def count_edge_paths(k, edges, a, b):
    """Directed edge-paths from a to b, by dynamic programming over the order 0 < 1 < ... ."""
    ways = {a: 1}
    for v in range(a + 1, k):
        ways[v] = sum(ways.get(s, 0) * m for (s, t), m in edges.items() if t == v)
    return ways.get(b, 0) if b != a else 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_free_flow_path_counts(k, data):
    edges = {}
    for s, t in itertools.combinations(range(k), 2):
        edges[(s, t)] = data.draw(st.integers(0, 2))
    gens = [(f"g{s}{t}{m}", str(s), str(t)) for (s, t), n in edges.items() for m in range(n)]
    X = materialize(FlowPresentation(FinSet.standard(k), tuple(gens)))
    for a, b in itertools.product(range(k), repeat=2):
        assert len(X.path_set(str(a), str(b))) == count_edge_paths(k, edges, a, b)
    assert composition_is_total_and_associative(X)


# -- hom-sets -----------------------------------------------------------------

def test_endomorphisms_of_segment():
    I = directed_segment()
    homs = enumerate_morphisms(I, I)
    assert FlowMorphism.identity(I) in homs
    assert sum(1 for h in homs if h.state_map.is_bijective()) == 1


def test_phi_is_enumerated():
    assert phi() in enumerate_morphisms(directed_segment(), segment_squared())


def test_glob_hom_count():
    homs = enumerate_morphisms(glob(FinSet.of("a")), glob(FinSet.of("a", "b")))
    assert len([h for h in homs if h.f0 == ("0", "1")]) == 2


@pytest.mark.parametrize("z,t", [(0, 0), (0, 2), (1, 1), (2, 1), (2, 3)])
def test_glob_is_full_and_faithful(z, t):
    Z, T = FinSet.standard(z), FinSet.standard(t)
    fixing = [h for h in enumerate_morphisms(glob(Z), glob(T)) if h.f0 == ("0", "1")]
    assert sorted(fixing, key=repr) == sorted((glob_map(f) for f in all_maps(Z, T)), key=repr)
    assert len(fixing) == t ** z


def test_enumerated_morphisms_are_homomorphisms():
    X, Y = segment_squared(), concat_globes(FinSet.of("a", "b"), FinSet.of("c"))
    homs = enumerate_morphisms(X, Y)
    assert homs and all(preserves_composition(h) for h in homs)


def test_budget_exceeded():
    X = Flow(FinSet.standard(6))
    with pytest.raises(BudgetExceeded) as exc:
        enumerate_morphisms(X, X, budget=100)
    assert exc.value.needed > exc.value.budget == 100
    assert hom_size_bound(X, Flow(FinSet.standard(2))) == 64


def test_budget_from_environment(monkeypatch):
    from flowcalc.flows import default_budget
    monkeypatch.setenv("FLOWCALC_BUDGET", "123")
    assert default_budget() == 123


def test_composite_of_morphisms():
    f = phi()
    idII = FlowMorphism.identity(segment_squared())
    assert idII @ f == f
    with pytest.raises(FlowError):
        f @ idII
