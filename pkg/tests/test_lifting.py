import itertools

import pytest
from hypothesis import given, settings, strategies as st

from flowcalc.finset import (EMPTY, FinSet, SetMap, enumerate_universe, is_retract, map_C, map_C_plus,
                             map_R)
from flowcalc.flows import FlowMorphism, directed_segment, glob_map, phi
from flowcalc.lifting import (LiftingSquare, NonCommutingSquare, find_filler, has_llp, has_rlp,
                              lifting_witness, llp_members, rlp_members, squares)

from flowgen import brute_llp, brute_set_llp

U3 = enumerate_universe(3)


def surjections(U):
    return [f for f in U if f.is_surjective()]


# -- fillers ------------------------------------------------------------------

def test_filler_C_against_R():
    C, R = map_C(), map_R()
    for top, bottom in squares(C, R):
        g = find_filler(LiftingSquare(C, R, top, bottom))
        assert g is not None and g @ C == top and R @ g == bottom


def test_identity_left_filler_is_top():
    p = SetMap.from_indices(FinSet.standard(3), FinSet.standard(2), [0, 1, 1])
    idB = SetMap.identity(p.domain)
    top = SetMap.from_indices(p.domain, p.domain, [2, 2, 0])
    assert find_filler(LiftingSquare(idB, p, top, p @ top)) == top


def test_R_against_R_has_no_filler():
    R = map_R()
    sq = LiftingSquare(R, R, SetMap.identity(R.domain), SetMap.identity(R.codomain))
    assert find_filler(sq) is None


def test_non_commuting_square_rejected():
    R = map_R()
    swap = SetMap.from_indices(R.domain, R.domain, [1, 0])
    with pytest.raises(NonCommutingSquare):
        LiftingSquare(map_C_plus(), map_C_plus(), SetMap.identity(map_C_plus().domain),
                      SetMap.from_indices(R.domain, R.domain, [1, 1]))
    with pytest.raises(NonCommutingSquare):
        LiftingSquare(R, R, swap, SetMap.identity(R.domain))


def test_filler_is_lexicographically_first():
    i = map_C()
    p = SetMap.from_indices(FinSet.standard(3), FinSet.standard(1), [0, 0, 0])
    sq = LiftingSquare(i, p, SetMap(EMPTY, p.domain, ()), SetMap.identity(i.codomain))
    assert find_filler(sq).table == ("0",)


# -- has_llp ------------------------------------------------------------------

def test_llp_examples():
    assert has_llp(map_C(), map_R())
    assert has_llp(map_R(), map_C())
    assert not has_llp(map_R(), map_R())
    w = lifting_witness(map_R(), map_R())
    assert w.top == SetMap.identity(map_R().domain) and w.bottom == SetMap.identity(map_R().codomain)


def test_llp_matches_brute_force_on_universe():
    for f, g in itertools.product(U3, repeat=2):
        assert has_llp(f, g) == brute_set_llp(f, g)


def test_duality_sets():
    for f, g in itertools.product(U3, repeat=2):
        assert has_llp(f, g) == has_rlp(g, f)


def test_duality_flows():
    I = directed_segment()
    arrows = [phi(), FlowMorphism.identity(I), glob_map(map_R()), glob_map(map_C()), glob_map(map_C_plus()),
              FlowMorphism.from_set_map(map_R())]
    for f, g in itertools.product(arrows, repeat=2):
        assert has_llp(f, g) == has_rlp(g, f) == brute_llp(f, g)


def test_phi_lifts_against_sets():
    for s in U3:
        assert has_llp(phi(), s)


def test_iso_lifts_against_everything():
    iso = SetMap.from_indices(FinSet.standard(2), FinSet.standard(2), [1, 0])
    assert all(has_llp(iso, g) and has_llp(g, iso) for g in U3)


# -- closures -----------------------------------------------------------------

def test_llp_members_examples():
    epis = surjections(U3)
    assert llp_members(epis, U3) == [f for f in U3 if f.is_injective()]
    assert llp_members([], U3) == U3
    assert llp_members([map_R()], U3) == [f for f in U3 if f.is_injective()]


def test_llp_of_R_and_surjection_views():
    # the surjections are exactly the arrows lifting against every injection
    monos = [f for f in U3 if f.is_injective()]
    assert llp_members(monos, U3) == surjections(U3)


def test_rlp_members_examples():
    assert rlp_members([map_C()], U3) == surjections(U3)
    assert rlp_members([map_C_plus()], U3) == [f for f in U3 if f.is_surjective() or not len(f.domain)]
    assert rlp_members([map_R(), map_C_plus()], U3) == [f for f in U3 if f.is_bijective() or not len(f.domain)]
    assert rlp_members([], U3) == U3


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(U3), st.sampled_from(U3))
def test_llp_closed_under_retracts(i, j):
    if not is_retract(j, i):
        return
    M = [g for g in U3 if has_llp(i, g)]
    assert all(has_llp(j, g) for g in M)
