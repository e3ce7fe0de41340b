"""Lifting properties decided by exhaustive diagonal-filler search.

Works on set maps (fast path through :mod:`flowcalc.kernels`) and on
morphisms of finite flows (hom-set enumeration).  A set map used together
with a flow morphism is treated as a morphism of path-empty flows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from . import kernels
from .finset import SetMap, all_maps
from .flows import FlowMorphism, enumerate_morphisms

Arrow = Union[SetMap, FlowMorphism]


class NonCommutingSquare(ValueError):
    pass


def _dom(f):
    return f.domain if isinstance(f, SetMap) else f.source


def _cod(f):
    return f.codomain if isinstance(f, SetMap) else f.target


def as_flow_morphism(f: Arrow) -> FlowMorphism:
    return FlowMorphism.from_set_map(f) if isinstance(f, SetMap) else f


def _common(*arrows):
    """Bring arrows into one category: all SetMaps, or all FlowMorphisms."""
    if all(isinstance(a, SetMap) for a in arrows):
        return arrows
    return tuple(as_flow_morphism(a) for a in arrows)


@dataclass(frozen=True)
class LiftingSquare:
    """top: dom(left) → dom(right), bottom: cod(left) → cod(right)."""

    left: Arrow
    right: Arrow
    top: Arrow
    bottom: Arrow

    def __post_init__(self):
        left, right, top, bottom = _common(self.left, self.right, self.top, self.bottom)
        for name, v in zip(("left", "right", "top", "bottom"), (left, right, top, bottom)):
            object.__setattr__(self, name, v)
        if _dom(top) != _dom(left) or _cod(top) != _dom(right):
            raise NonCommutingSquare("top does not go from dom(left) to dom(right)")
        if _dom(bottom) != _cod(left) or _cod(bottom) != _cod(right):
            raise NonCommutingSquare("bottom does not go from cod(left) to cod(right)")
        if right @ top != bottom @ left:
            raise NonCommutingSquare("right∘top ≠ bottom∘left")

    def is_filler(self, g: Arrow) -> bool:
        return g @ self.left == self.top and self.right @ g == self.bottom


def _set_filler(sq: LiftingSquare) -> SetMap | None:
    # the constraints on g are independent per element of cod(left), so the
    # lexicographically first filler takes the least admissible value at each position
    i, p, top, bottom = sq.left, sq.right, sq.top, sq.bottom
    values = []
    for b in i.codomain:
        fiber = i.fiber(b)
        if fiber:
            forced = {top(a) for a in fiber}
            if len(forced) > 1:
                return None
            values.append(forced.pop())
        else:
            options = [x for x in p.domain if p(x) == bottom(b)]
            if not options:
                return None
            values.append(options[0])
    return SetMap(i.codomain, p.domain, tuple(values))


def find_filler(sq: LiftingSquare, budget: int | None = None) -> Arrow | None:
    """The first diagonal g with g∘left = top and right∘g = bottom, or None."""
    if isinstance(sq.left, SetMap):
        return _set_filler(sq)
    for g in enumerate_morphisms(_cod(sq.left), _dom(sq.right), budget):
        if sq.is_filler(g):
            return g
    return None


# ---------------------------------------------------------------------------
# squares


def set_squares(i: SetMap, p: SetMap):
    for top in all_maps(i.domain, p.domain):
        pt = p @ top
        for bottom in all_maps(i.codomain, p.codomain):
            if bottom @ i == pt:
                yield top, bottom


def flow_squares(i: FlowMorphism, p: FlowMorphism, budget: int | None = None):
    tops = enumerate_morphisms(i.source, p.source, budget)
    bottoms = enumerate_morphisms(i.target, p.target, budget)
    by_key: dict = {}
    for b in bottoms:
        by_key.setdefault(b @ i, []).append(b)
    for t in tops:
        for b in by_key.get(p @ t, ()):
            yield t, b


def squares(i: Arrow, p: Arrow, budget: int | None = None):
    """Every commuting square (top, bottom) with left ``i`` and right ``p``."""
    i, p = _common(i, p)
    if isinstance(i, SetMap):
        return set_squares(i, p)
    return flow_squares(i, p, budget)


def _filler_keys(i: FlowMorphism, p: FlowMorphism, budget):
    return {(g @ i, p @ g) for g in enumerate_morphisms(i.target, p.source, budget)}


def lifting_witness(i: Arrow, p: Arrow, budget: int | None = None) -> LiftingSquare | None:
    """A commuting square with no diagonal filler, or None when i ⧄ p."""
    i, p = _common(i, p)
    if isinstance(i, SetMap):
        if has_llp(i, p):
            return None
        for top, bottom in set_squares(i, p):
            sq = LiftingSquare(i, p, top, bottom)
            if _set_filler(sq) is None:
                return sq
        raise AssertionError("kernel and filler search disagree")  # pragma: no cover
    keys = _filler_keys(i, p, budget)
    for top, bottom in flow_squares(i, p, budget):
        if (top, bottom) not in keys:
            return LiftingSquare(i, p, top, bottom)
    return None


def has_llp(i: Arrow, p: Arrow, budget: int | None = None) -> bool:
    """Does ``i`` have the left lifting property with respect to ``p``?"""
    i, p = _common(i, p)
    if isinstance(i, SetMap):
        return _set_llp(i, p)
    return lifting_witness(i, p, budget) is None


def has_rlp(p: Arrow, i: Arrow, budget: int | None = None) -> bool:
    """Does ``p`` have the right lifting property with respect to ``i``?

    Runs the search from the right-hand side: for each bottom map, the tops
    it can be paired with, and for each such square a filler.  Kept separate
    from :func:`has_llp` so the two can be cross-checked.
    """
    i, p = _common(i, p)
    if isinstance(i, SetMap):
        for bottom in all_maps(i.codomain, p.codomain):
            bi = bottom @ i
            for top in all_maps(i.domain, p.domain):
                if p @ top == bi and _set_filler(LiftingSquare(i, p, top, bottom)) is None:
                    return False
        return True
    fillers = enumerate_morphisms(i.target, p.source, budget)
    for bottom in enumerate_morphisms(i.target, p.target, budget):
        bi = bottom @ i
        for top in enumerate_morphisms(i.source, p.source, budget):
            if p @ top != bi:
                continue
            if not any(g @ i == top and p @ g == bottom for g in fillers):
                return False
    return True


def _set_llp(i: SetMap, p: SetMap) -> bool:
    return kernels.set_llp(i.indices, len(i.codomain), p.indices, len(p.domain), len(p.codomain))


# ---------------------------------------------------------------------------
# closures over a universe


def llp_matrix(lefts: Sequence[Arrow], rights: Sequence[Arrow], budget: int | None = None) -> np.ndarray:
    if all(isinstance(a, SetMap) for a in itertools.chain(lefts, rights)):
        return kernels.set_llp_matrix([(f.indices, len(f.codomain)) for f in lefts],
                                      [(f.indices, len(f.codomain)) for f in rights])
    out = np.zeros((len(lefts), len(rights)), dtype=bool)
    for u, f in enumerate(lefts):
        for v, g in enumerate(rights):
            out[u, v] = has_llp(f, g, budget)
    return out


@lru_cache(maxsize=16)
def _cached_matrix(lefts: tuple, rights: tuple) -> np.ndarray:
    m = llp_matrix(lefts, rights)
    m.setflags(write=False)
    return m


def llp_members(M: Sequence[Arrow], universe: Sequence[Arrow]) -> list[Arrow]:
    """Arrows of the universe with the LLP against every arrow of M."""
    universe = list(universe)
    if not M:
        return universe
    mat = _cached_matrix(tuple(universe), tuple(M))
    return [u for u, row in zip(universe, mat) if row.all()]


def rlp_members(K: Sequence[Arrow], universe: Sequence[Arrow]) -> list[Arrow]:
    """Arrows of the universe with the RLP against every arrow of K."""
    universe = list(universe)
    if not K:
        return universe
    mat = _cached_matrix(tuple(K), tuple(universe))
    return [u for u, col in zip(universe, mat.T) if col.all()]
