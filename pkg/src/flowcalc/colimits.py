"""Pushouts and coproducts of flows, computed on presentations.

The apex of a pushout is presented by the generators and relations of both
codomains, with vertices and edges identified along the span (union-find),
so a pushout that creates a loop is representable even though its
materialisation is infinite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .finset import FinSet, SetMap, glue_labels
from .flows import (Flow, FlowMorphism, FlowPresentation, Materialized, Path, _materialize,
                    edge_names, enumerate_morphisms)


class NonCommutingCocone(ValueError):
    pass


class PushoutError(RuntimeError):
    pass


def _as_morphism(f: Union[SetMap, FlowMorphism]) -> FlowMorphism:
    return FlowMorphism.from_set_map(f) if isinstance(f, SetMap) else f


@dataclass(frozen=True)
class PushoutResult:
    f: FlowMorphism  # Z → X
    g: FlowMorphism  # Z → Y
    apex: FlowPresentation
    vertex_leg1: dict
    vertex_leg2: dict
    edge_leg1: dict  # path of X -> apex edge label
    edge_leg2: dict

    def __hash__(self):
        return hash((self.f, self.g, self.apex))

    def materialize(self, max_len: int | None = None) -> tuple[Flow, FlowMorphism, FlowMorphism]:
        """The apex as a finite flow with the two legs X → apex ← Y."""
        mat = _materialize(self.apex, max_len)
        return mat.flow, self._leg(mat, 1), self._leg(mat, 2)

    def _leg(self, mat: Materialized, side: int) -> FlowMorphism:
        src = self.f.target if side == 1 else self.g.target
        vleg = self.vertex_leg1 if side == 1 else self.vertex_leg2
        eleg = self.edge_leg1 if side == 1 else self.edge_leg2
        return FlowMorphism(src, mat.flow, tuple(vleg[s] for s in src.states),
                            tuple(mat.path_of((eleg[p],)) for p in src.paths))


def pushout(f, g) -> PushoutResult:
    """Pushout of the span X ←f– Z –g→ Y."""
    f, g = _as_morphism(f), _as_morphism(g)
    if f.source != g.source:
        raise ValueError("span legs must share their source")
    X, Y, Z = f.target, g.target, f.source
    states, v1, v2 = glue_labels(X.states, Y.states, ((f.state(z), g.state(z)) for z in Z.states))
    nx, ny = edge_names(X), edge_names(Y)
    labels, e1n, e2n = glue_labels([nx[p] for p in X.paths], [ny[p] for p in Y.paths],
                                   ((nx[f.path(p)], ny[g.path(p)]) for p in Z.paths))
    e1 = {p: e1n[nx[p]] for p in X.paths}
    e2 = {p: e2n[ny[p]] for p in Y.paths}
    edges = {}
    for p in X.paths:
        edges[e1[p]] = (e1[p], v1[p[0]], v1[p[1]])
    for p in Y.paths:
        edges.setdefault(e2[p], (e2[p], v2[p[0]], v2[p[1]]))
    rels = set()
    for side, emap, flow in ((1, e1, X), (2, e2, Y)):
        for x, y, z in flow.composition:
            u, v = (emap[x], emap[y]), (emap[z],)
            rels.add((u, v))
    apex = FlowPresentation(FinSet(tuple(states)), tuple(edges.values()), tuple(sorted(rels)))
    return PushoutResult(f, g, apex, v1, v2, e1, e2)


def coproduct(X: Flow, Y: Flow) -> PushoutResult:
    empty = Flow(FinSet(()))
    return pushout(FlowMorphism(empty, X, ()), FlowMorphism(empty, Y, ()))


def mediating_morphism(po: PushoutResult, cocone: tuple, check_unique: bool = True,
                       budget: int | None = None) -> FlowMorphism:
    """The morphism apex → W through which the cocone (u: X→W, v: Y→W) factors.

    With ``check_unique`` every morphism apex → W is enumerated (within the
    search budget) to confirm no second factorisation exists.
    """
    u, v = (_as_morphism(c) for c in cocone)
    if u.source != po.f.target or v.source != po.g.target or u.target != v.target:
        raise NonCommutingCocone("cocone legs do not match the span")
    if u @ po.f != v @ po.g:
        raise NonCommutingCocone("u∘f ≠ v∘g")
    W = u.target
    mat = _materialize(po.apex)
    apex = mat.flow
    state_img = {}
    for x, a in po.vertex_leg1.items():
        state_img.setdefault(a, u.state(x))
    for y, a in po.vertex_leg2.items():
        state_img.setdefault(a, v.state(y))
    edge_img = {}
    for p, e in po.edge_leg1.items():
        edge_img.setdefault(e, u.path(p))
    for p, e in po.edge_leg2.items():
        edge_img.setdefault(e, v.path(p))
    reps: dict[Path, tuple[str, ...]] = {}
    for w, path in mat.classes.items():
        cur = reps.get(path)
        if cur is None or (len(w), w) < (len(cur), cur):
            reps[path] = w
    fpath = []
    for path in apex.paths:
        word = reps[path]
        img = edge_img[word[0]]
        for e in word[1:]:
            img = W.compose(img, edge_img[e])
        fpath.append(img)
    h = FlowMorphism(apex, W, tuple(state_img[s] for s in apex.states), tuple(fpath))
    if check_unique:
        _, l1, l2 = po.materialize()
        matches = [k for k in enumerate_morphisms(apex, W, budget) if k @ l1 == u and k @ l2 == v]
        if matches != [h]:
            raise PushoutError(f"universal property fails: {len(matches)} factorisations")
    return h


@dataclass(frozen=True)
class Codiagonal:
    apex: Flow
    k1: FlowMorphism
    k2: FlowMorphism
    h: FlowMorphism


def codiagonal_construction(g) -> Codiagonal:
    """Y ⊔_X Y for g: X → Y, its two legs, and the fold h induced by (id_Y, id_Y)."""
    g = _as_morphism(g)
    po = pushout(g, g)
    apex, k1, k2 = po.materialize()
    idY = FlowMorphism.identity(g.target)
    h = mediating_morphism(po, (idY, idY))
    return Codiagonal(apex, k1, k2, h)
