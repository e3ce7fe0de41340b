import random

import pytest

from flowcalc.colimits import (NonCommutingCocone, codiagonal_construction, coproduct, mediating_morphism,
                               pushout)
from flowcalc.finset import EMPTY, FinSet, map_C, map_C_plus, map_R, pushout_sets
from flowcalc.flows import (Flow, FlowMorphism, InfinitePathSet, concat_globes, directed_segment, is_isomorphic,
                            segment_squared)

from flowgen import composition_is_total_and_associative, random_flow, random_morphism

I = directed_segment()
POINT = Flow(FinSet.of("0"))


def end_to_start():
    """The span I ← {*} → I gluing the final state of one copy to the initial state of the other."""
    return FlowMorphism(POINT, I, ("1",)), FlowMorphism(POINT, I, ("0",))


def test_gluing_ends_of_segment_creates_loop():
    iota = FlowMorphism(Flow(FinSet.standard(2)), I, ("0", "1"))
    po = pushout(FlowMorphism.from_set_map(map_R()), iota)
    assert len(po.apex.vertices) == 1 and len(po.apex.edges) == 1
    assert po.apex.find_cycle() is not None
    with pytest.raises(InfinitePathSet):
        po.materialize()


def test_pushout_along_empty_adds_point():
    X = segment_squared()
    po = pushout(FlowMorphism(Flow(EMPTY), X, ()), FlowMorphism.from_set_map(map_C()))
    apex, l1, l2 = po.materialize()
    assert len(apex.states) == 4 and len(apex.paths) == len(X.paths)
    assert is_isomorphic(apex, coproduct(X, POINT).materialize()[0])


def test_pushout_realises_concatenation():
    apex, l1, l2 = pushout(*end_to_start()).materialize()
    assert len(apex.states) == 3
    assert is_isomorphic(apex, concat_globes(FinSet.of("u"), FinSet.of("v")))
    assert composition_is_total_and_associative(apex)


def test_coproduct():
    E = Flow(EMPTY)
    X = segment_squared()
    assert is_isomorphic(coproduct(E, X).materialize()[0], X)
    apex, l1, l2 = coproduct(I, I).materialize()
    assert len(apex.states) == 4 and len(apex.paths) == 2
    assert set(l1.f0) | set(l2.f0) == set(apex.states)
    assert set(l1.fpath) | set(l2.fpath) == set(apex.paths)


def test_legs_commute():
    f, g = end_to_start()
    po = pushout(f, g)
    _, l1, l2 = po.materialize()
    assert l1 @ f == l2 @ g


def test_mediating_morphism_of_legs_is_identity():
    f, g = end_to_start()
    po = pushout(f, g)
    apex, l1, l2 = po.materialize()
    assert mediating_morphism(po, (l1, l2)) == FlowMorphism.identity(apex)


def test_mediating_morphism_of_globe_square():
    # cocone I → I*I ← I given by the two halves; the composite must go to the long path
    f, g = end_to_start()
    II = segment_squared()
    u = FlowMorphism(I, II, ("0", "1"), (("0", "1", "[0,1]"),))
    v = FlowMorphism(I, II, ("1", "2"), (("1", "2", "[0,1]"),))
    h = mediating_morphism(pushout(f, g), (u, v))
    long_paths = [p for p in h.source.paths if p[0] != p[1] and h.state(p[0]) == "0" and h.state(p[1]) == "2"]
    assert [h.path(p) for p in long_paths] == [("0", "2", "[0,1]*[0,1]")]
    assert h.is_bijective()


def test_non_commuting_cocone():
    f, g = end_to_start()
    II = segment_squared()
    u = FlowMorphism(I, II, ("0", "1"), (("0", "1", "[0,1]"),))
    with pytest.raises(NonCommutingCocone):
        mediating_morphism(pushout(f, g), (u, u))


def test_codiagonal_of_identity():
    X = segment_squared()
    cd = codiagonal_construction(FlowMorphism.identity(X))
    assert is_isomorphic(cd.apex, X) and cd.h.is_bijective()


def test_codiagonal_of_C_plus():
    cd = codiagonal_construction(map_C_plus())
    h0 = cd.h.state_map
    assert len(cd.apex.states) == 3 and len(h0.codomain) == 2
    assert h0.is_surjective() and not h0.is_injective()
    idY = FlowMorphism.identity(cd.h.target)
    assert cd.h @ cd.k1 == idY and cd.h @ cd.k2 == idY


def test_codiagonal_of_state_bijection():
    g = FlowMorphism(I, I, ("0", "1"), (("0", "1", "[0,1]"),))
    assert codiagonal_construction(g).h.state_map.is_bijective()


def test_set_pushout_accepts_set_maps():
    apex, l1, l2 = pushout(map_R(), map_R()).materialize()
    assert len(apex.states) == 1


@pytest.mark.parametrize("seed", range(40))
def test_skeleton_commutes_with_pushout(seed):
    rng = random.Random(seed)
    while True:
        Z, X, Y = random_flow(rng, 2), random_flow(rng), random_flow(rng)
        f, g = random_morphism(rng, Z, X), random_morphism(rng, Z, Y)
        if f is not None and g is not None:
            break
    P, a, b = pushout_sets(f.state_map, g.state_map)
    po = pushout(f, g)
    assert len(po.apex.vertices) == len(P)
    # same identifications on states
    for x in X.states:
        for y in Y.states:
            assert (po.vertex_leg1[x] == po.vertex_leg2[y]) == (a(x) == b(y))


@pytest.mark.parametrize("seed", range(30))
def test_pushout_of_state_surjection_is_state_surjective(seed):
    rng = random.Random(1000 + seed)
    while True:
        Z, X, Y = random_flow(rng, 2), random_flow(rng), random_flow(rng)
        f, g = random_morphism(rng, Z, X), random_morphism(rng, Z, Y)
        if f is not None and g is not None and f.state_map.is_surjective():
            break
    po = pushout(f, g)
    assert set(po.vertex_leg2.values()) == set(po.apex.vertices.elements)
