"""Finite flows with discrete path sets.

A flow has a set of states and, for every ordered pair of states (a, b), a
finite set of execution paths from a to b, together with an associative
composition ``P[a,b] × P[b,c] → P[a,c]``.  Paths are addressed as triples
``(source, target, label)``; labels only need to be unique within one pair.

Finitely presented flows (a generator graph plus relations between
composable words) are turned into finite flows by :func:`materialize`.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from .finset import FinSet, SetMap, UnionFind

Path = tuple[str, str, str]

DEFAULT_BUDGET = 10 ** 7


def default_budget() -> int:
    return int(os.environ.get("FLOWCALC_BUDGET", DEFAULT_BUDGET))


class FlowError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, needed: int | None = None, budget: int | None = None, partial=None):
        super().__init__(message)
        self.needed = needed
        self.budget = budget
        self.partial = partial


class InfinitePathSet(RuntimeError):
    """Raised when a presentation contains a directed cycle of generators."""

    def __init__(self, cycle: list[tuple[str, str, str]]):
        self.cycle = cycle
        states = " → ".join([cycle[0][1]] + [e[2] for e in cycle]) if cycle else ""
        super().__init__(f"infinite path set: directed cycle {states}")


@dataclass(frozen=True)
class Flow:
    states: FinSet
    paths: tuple[Path, ...] = ()
    composition: tuple[tuple[Path, Path, Path], ...] = ()
    truncated: bool = False

    def __post_init__(self):
        if len(self.paths) != len(set(self.paths)):
            raise FlowError("duplicate path")
        object.__setattr__(self, "paths", tuple(sorted(self.paths)))
        object.__setattr__(self, "composition", tuple(sorted(set(self.composition))))
        self._validate()

    # -- construction ---------------------------------------------------
    @classmethod
    def build(cls, states: Iterable[str], paths: Mapping[tuple[str, str], Iterable[str]] = (),
              compose: Mapping[tuple[Path, Path], Path] | Iterable = (), truncated=False) -> "Flow":
        plist = [(a, b, lab) for (a, b), labels in dict(paths).items() for lab in labels]
        if isinstance(compose, Mapping):
            comp = [(x, y, z) for (x, y), z in compose.items()]
        else:
            comp = list(compose)
        return cls(FinSet(tuple(states)), tuple(plist), tuple(comp), truncated)

    @classmethod
    def from_set(cls, s: FinSet) -> "Flow":
        return cls(s)

    def _validate(self):
        for a, b, _ in self.paths:
            if a not in self.states or b not in self.states:
                raise FlowError(f"path endpoints {(a, b)} are not states")
        pathset = set(self.paths)
        seen = {}
        for x, y, z in self.composition:
            if x not in pathset or y not in pathset or z not in pathset:
                raise FlowError(f"composition {x}*{y} references an unknown path")
            if x[1] != y[0]:
                raise FlowError(f"{x} and {y} are not composable")
            if z[0] != x[0] or z[1] != y[1]:
                raise FlowError(f"{x}*{y} = {z} has the wrong endpoints")
            if (x, y) in seen:
                raise FlowError(f"{x}*{y} defined twice")
            seen[(x, y)] = z
        if not self.truncated:
            for x in self.paths:
                for y in self.out_paths(x[1]):
                    if (x, y) not in seen:
                        raise FlowError(f"composition undefined on {x}, {y}")
            bad = self.associativity_violations()
            if bad:
                raise FlowError(f"composition is not associative on {bad[0]}")

    # -- structure ------------------------------------------------------
    @cached_property
    def comp(self) -> dict[tuple[Path, Path], Path]:
        return {(x, y): z for x, y, z in self.composition}

    @cached_property
    def _by_pair(self) -> dict[tuple[str, str], tuple[Path, ...]]:
        out: dict[tuple[str, str], list[Path]] = {}
        for p in self.paths:
            out.setdefault((p[0], p[1]), []).append(p)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _by_source(self) -> dict[str, tuple[Path, ...]]:
        out: dict[str, list[Path]] = {}
        for p in self.paths:
            out.setdefault(p[0], []).append(p)
        return {k: tuple(v) for k, v in out.items()}

    def path_set(self, a: str, b: str) -> tuple[Path, ...]:
        """P_{a,b}: the paths from a to b."""
        return self._by_pair.get((a, b), ())

    def path_labels(self, a: str, b: str) -> FinSet:
        return FinSet(tuple(p[2] for p in self.path_set(a, b)))

    def out_paths(self, a: str) -> tuple[Path, ...]:
        return self._by_source.get(a, ())

    def compose(self, x: Path, y: Path) -> Path:
        try:
            return self.comp[(x, y)]
        except KeyError:
            raise FlowError(f"{x}*{y} is undefined") from None

    def is_set(self) -> bool:
        return not self.paths

    def initial_states(self) -> list[str]:
        targets = {p[1] for p in self.paths}
        return [s for s in self.states if s not in targets]

    def final_states(self) -> list[str]:
        sources = {p[0] for p in self.paths}
        return [s for s in self.states if s not in sources]

    def associativity_violations(self) -> list[tuple[Path, Path, Path]]:
        bad = []
        comp = self.comp
        for x in self.paths:
            for y in self.out_paths(x[1]):
                xy = comp.get((x, y))
                for z in self.out_paths(y[1]):
                    yz = comp.get((y, z))
                    if xy is None or yz is None:
                        continue
                    left, right = comp.get((xy, z)), comp.get((x, yz))
                    if left is None or right is None:
                        continue
                    if left != right:
                        bad.append((x, y, z))
        return bad

    def is_associative(self) -> bool:
        return not self.associativity_violations()

    def indecomposable_paths(self) -> list[Path]:
        composites = set(self.comp.values())
        return [p for p in self.paths if p not in composites]

    def __repr__(self):
        return f"Flow(states={self.states}, paths={len(self.paths)}{', truncated' if self.truncated else ''})"


@dataclass(frozen=True)
class FlowMorphism:
    """A state map together with path maps P_{a,b}X → P_{f(a),f(b)}Y preserving *."""

    source: Flow
    target: Flow
    f0: tuple[str, ...]
    fpath: tuple[Path, ...] = ()
    _validated: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "f0", tuple(self.f0))
        object.__setattr__(self, "fpath", tuple(self.fpath))
        if self._validated:
            self._validate()

    @classmethod
    def build(cls, source: Flow, target: Flow, states: Mapping[str, str],
              paths: Mapping[Path, Path] = ()) -> "FlowMorphism":
        paths = dict(paths)
        return cls(source, target, tuple(states[s] for s in source.states),
                   tuple(paths[p] for p in source.paths))

    @classmethod
    def identity(cls, X: Flow) -> "FlowMorphism":
        return cls(X, X, X.states.elements, X.paths)

    @classmethod
    def from_set_map(cls, f: SetMap) -> "FlowMorphism":
        return cls(Flow.from_set(f.domain), Flow.from_set(f.codomain), f.table)

    def _validate(self):
        X, Y = self.source, self.target
        if len(self.f0) != len(X.states) or len(self.fpath) != len(X.paths):
            raise FlowError("morphism tables do not match the source flow")
        for v in self.f0:
            if v not in Y.states:
                raise FlowError(f"{v!r} is not a state of the target")
        ypaths = set(Y.paths)
        for p, q in zip(X.paths, self.fpath):
            if q not in ypaths:
                raise FlowError(f"{q} is not a path of the target")
            if (q[0], q[1]) != (self.state(p[0]), self.state(p[1])):
                raise FlowError(f"path {p} is sent to {q}, which has the wrong endpoints")
        bad = self.homomorphism_violations()
        if bad:
            raise FlowError(f"morphism does not preserve composition on {bad[0]}")

    @cached_property
    def _state_map(self) -> dict[str, str]:
        return dict(zip(self.source.states.elements, self.f0))

    @cached_property
    def _path_map(self) -> dict[Path, Path]:
        return dict(zip(self.source.paths, self.fpath))

    def state(self, s: str) -> str:
        return self._state_map[s]

    def path(self, p: Path) -> Path:
        return self._path_map[p]

    @property
    def state_map(self) -> SetMap:
        return SetMap(self.source.states, self.target.states, self.f0)

    def path_map(self, a: str, b: str) -> SetMap:
        """The component P_{a,b}X → P_{f(a),f(b)}Y as a map of label sets."""
        dom = self.source.path_labels(a, b)
        cod = self.target.path_labels(self.state(a), self.state(b))
        return SetMap(dom, cod, tuple(self.path((a, b, lab))[2] for lab in dom))

    def homomorphism_violations(self) -> list[tuple[Path, Path]]:
        bad = []
        X, Y = self.source, self.target
        for (x, y), z in X.comp.items():
            fx, fy = self.path(x), self.path(y)
            fxy = Y.comp.get((fx, fy))
            if fxy is None and Y.truncated:
                continue
            if fxy != self.path(z):
                bad.append((x, y))
        return bad

    def __matmul__(self, other: "FlowMorphism") -> "FlowMorphism":
        """``g @ f`` is g∘f."""
        if other.target != self.source:
            raise FlowError("morphisms are not composable")
        return FlowMorphism(other.source, self.target,
                            tuple(self.state(v) for v in other.f0),
                            tuple(self.path(q) for q in other.fpath), _validated=False)

    def is_bijective(self) -> bool:
        """Bijective on states and on every path set P_{a,b}."""
        if not self.state_map.is_bijective():
            return False
        X = self.source
        return all(self.path_map(a, b).is_bijective() for a in X.states for b in X.states)

    def __repr__(self):
        body = ", ".join(f"{s}↦{v}" for s, v in zip(self.source.states, self.f0))
        return f"FlowMorphism({body}; {len(self.fpath)} paths)"


# ---------------------------------------------------------------------------
# globes


def glob(Z: FinSet) -> Flow:
    """States {0, 1}, P_{0,1} = Z, nothing else."""
    return Flow(FinSet.of("0", "1"), tuple(("0", "1", z) for z in Z))


def directed_segment() -> Flow:
    return glob(FinSet.of("[0,1]"))


def glob_map(f: SetMap) -> FlowMorphism:
    """Glob(f): Glob(U) → Glob(V), the identity on {0, 1}."""
    X, Y = glob(f.domain), glob(f.codomain)
    return FlowMorphism(X, Y, ("0", "1"), tuple(("0", "1", f(p[2])) for p in X.paths))


def concat_globes(Z: FinSet, T: FinSet) -> Flow:
    """Glob(Z)*Glob(T): the final state of the first globe glued to the initial state of the second."""
    paths = [("0", "1", z) for z in Z] + [("1", "2", t) for t in T]
    comp = []
    for z in Z:
        for t in T:
            zt = ("0", "2", f"{z}*{t}")
            paths.append(zt)
            comp.append((("0", "1", z), ("1", "2", t), zt))
    return Flow(FinSet.of("0", "1", "2"), tuple(paths), tuple(comp))


def segment_squared() -> Flow:
    seg = directed_segment().path_labels("0", "1")
    return concat_globes(seg, seg)


def phi() -> FlowMorphism:
    """The subdivision I → I*I sending the segment to the composite of the two halves."""
    I, II = directed_segment(), segment_squared()
    return FlowMorphism(I, II, ("0", "2"), (("0", "2", "[0,1]*[0,1]"),))


# ---------------------------------------------------------------------------
# presentations


Edge = tuple[str, str, str]  # (label, source, target)


@dataclass(frozen=True)
class FlowPresentation:
    vertices: FinSet
    edges: tuple[Edge, ...] = ()
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(tuple(e) for e in self.edges)))
        rels = tuple(sorted((tuple(u), tuple(v)) for u, v in self.relations))
        object.__setattr__(self, "relations", rels)
        labels = [e[0] for e in self.edges]
        if len(set(labels)) != len(labels):
            raise FlowError("edge labels must be unique")
        for lab, s, t in self.edges:
            if s not in self.vertices or t not in self.vertices:
                raise FlowError(f"edge {lab} has an unknown endpoint")
        for u, v in self.relations:
            eu, ev = self.word_ends(u), self.word_ends(v)
            if eu != ev:
                raise FlowError(f"relation {u} ~ {v} relates words with different endpoints")

    @cached_property
    def edge_index(self) -> dict[str, Edge]:
        return {e[0]: e for e in self.edges}

    def word_ends(self, word: Sequence[str]) -> tuple[str, str]:
        if not word:
            raise FlowError("relation words must be nonempty")
        try:
            es = [self.edge_index[w] for w in word]
        except KeyError as exc:
            raise FlowError(f"unknown edge {exc.args[0]!r} in relation") from None
        for e1, e2 in zip(es, es[1:]):
            if e1[2] != e2[1]:
                raise FlowError(f"word {list(word)} is not composable")
        return es[0][1], es[-1][2]

    @classmethod
    def from_flow(cls, X: Flow) -> "FlowPresentation":
        """Every path is a generator, every composite x*y = z a relation."""
        names = edge_names(X)
        edges = tuple((names[p], p[0], p[1]) for p in X.paths)
        rels = tuple(((names[x], names[y]), (names[z],)) for x, y, z in X.composition)
        return cls(X.states, edges, rels)

    def find_cycle(self) -> list[Edge] | None:
        """A directed cycle of edges, or None if the generator graph is acyclic."""
        out: dict[str, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e[1], []).append(e)
        color = {v: 0 for v in self.vertices}
        stack_edges: list[Edge] = []

        def visit(v):
            color[v] = 1
            for e in out.get(v, []):
                w = e[2]
                stack_edges.append(e)
                if color[w] == 1:
                    start = next(k for k, se in enumerate(stack_edges) if se[1] == w)
                    return stack_edges[start:]
                if color[w] == 0:
                    found = visit(w)
                    if found:
                        return found
                stack_edges.pop()
            color[v] = 2
            return None

        for v in self.vertices:
            if color[v] == 0:
                found = visit(v)
                if found:
                    return list(found)
        return None


def edge_names(X: Flow) -> dict[Path, str]:
    """Generator labels for the paths of X: bare labels when unambiguous."""
    counts: dict[str, int] = {}
    for p in X.paths:
        counts[p[2]] = counts.get(p[2], 0) + 1
    return {p: p[2] if counts[p[2]] == 1 else f"{p[0]}->{p[1]}:{p[2]}" for p in X.paths}


@dataclass
class Materialized:
    flow: Flow
    classes: dict[tuple[str, ...], Path]  # word -> path of the flow

    def path_of(self, word: Sequence[str]) -> Path:
        return self.classes[tuple(word)]


def _materialize(p: FlowPresentation, max_len: int | None = None) -> Materialized:
    cycle = p.find_cycle()
    truncated = False
    if cycle is not None:
        if max_len is None:
            raise InfinitePathSet([(e[0], e[1], e[2]) for e in cycle])
        truncated = True
    out: dict[str, list[Edge]] = {}
    for e in p.edges:
        out.setdefault(e[1], []).append(e)

    words: list[tuple[str, ...]] = []
    ends: list[tuple[str, str]] = []
    frontier = [((e[0],), e[1], e[2]) for e in p.edges]
    length = 1
    while frontier and (max_len is None or length <= max_len):
        nxt = []
        for w, s, t in frontier:
            words.append(w)
            ends.append((s, t))
            for e in out.get(t, []):
                nxt.append((w + (e[0],), s, e[2]))
        frontier = nxt
        length += 1
    index = {w: k for k, w in enumerate(words)}

    uf = UnionFind(len(words))
    rules = [(u, v) for u, v in p.relations] + [(v, u) for u, v in p.relations]
    for k, w in enumerate(words):
        for u, v in rules:
            n = len(u)
            for pos in range(len(w) - n + 1):
                if w[pos:pos + n] == u:
                    other = index.get(w[:pos] + v + w[pos + n:])
                    if other is not None:
                        uf.union(k, other)

    classes = uf.classes()
    reps = [min((words[k] for k in cls), key=lambda w: (len(w), w)) for cls in classes]
    word_to_path: dict[tuple[str, ...], Path] = {}
    paths = []
    taken: set[Path] = set()
    # generator classes first, so a free composite never steals a generator's label
    for j in sorted(range(len(classes)), key=lambda j: (len(reps[j]), reps[j])):
        cls, rep = classes[j], reps[j]
        s, t = ends[cls[0]]
        path = (s, t, "*".join(rep))
        while path in taken:
            path = (s, t, path[2] + "'")
        taken.add(path)
        paths.append(path)
        for k in cls:
            word_to_path[words[k]] = path
    rep_of = {}
    for w, path in word_to_path.items():
        cur = rep_of.get(path)
        if cur is None or (len(w), w) < (len(cur), cur):
            rep_of[path] = w
    comp = []
    by_source: dict[str, list[Path]] = {}
    for path in paths:
        by_source.setdefault(path[0], []).append(path)
    for x in paths:
        for y in by_source.get(x[1], []):
            z = word_to_path.get(rep_of[x] + rep_of[y])
            if z is not None:
                comp.append((x, y, z))
    flow = Flow(p.vertices, tuple(paths), tuple(comp), truncated=truncated)
    return Materialized(flow, word_to_path)


def materialize(p: FlowPresentation, max_len: int | None = None) -> Flow:
    """The flow presented by ``p``.

    For an acyclic generator graph the result is exact: P_{a,b} is the set of
    classes of composable words from a to b under the congruence generated by
    the relations.  A directed cycle raises :class:`InfinitePathSet` unless
    ``max_len`` is given, in which case only words of length ≤ max_len are kept
    and the flow is flagged ``truncated``.
    """
    return _materialize(p, max_len).flow


# ---------------------------------------------------------------------------
# hom-sets


def _candidate_count(X: Flow, Y: Flow, f0: Sequence[str]) -> int:
    m = dict(zip(X.states.elements, f0))
    total = 1
    for p in X.paths:
        total *= len(Y.path_set(m[p[0]], m[p[1]]))
        if total == 0:
            break
    return total


def hom_size_bound(X: Flow, Y: Flow, budget: int | None = None) -> int:
    """Number of candidate assignments the enumeration will examine.

    Stops counting once the budget is exceeded.
    """
    budget = default_budget() if budget is None else budget
    n_state_maps = len(Y.states) ** len(X.states)
    if n_state_maps > budget:
        return n_state_maps
    total = 0
    for f0 in itertools.product(Y.states.elements, repeat=len(X.states)):
        total += max(1, _candidate_count(X, Y, f0))
        if total > budget:
            break
    return total


def enumerate_morphisms(X: Flow, Y: Flow, budget: int | None = None) -> list[FlowMorphism]:
    """All morphisms X → Y in canonical order (state table, then path table)."""
    budget = default_budget() if budget is None else budget
    return list(_homs(X, Y, budget))


@lru_cache(maxsize=4096)
def _homs(X: Flow, Y: Flow, budget: int) -> tuple[FlowMorphism, ...]:
    needed = hom_size_bound(X, Y, budget)
    if needed > budget:
        raise BudgetExceeded(f"hom-set enumeration needs more than {budget} candidate assignments",
                             needed=needed, budget=budget)
    order = {p: k for k, p in enumerate(X.paths)}
    # composition constraints, checked as soon as their last path is assigned
    checks: list[list[tuple[int, int, int]]] = [[] for _ in X.paths]
    for x, y, z in X.composition:
        ix, iy, iz = order[x], order[y], order[z]
        checks[max(ix, iy, iz)].append((ix, iy, iz))
    result = []
    for f0 in itertools.product(Y.states.elements, repeat=len(X.states)):
        m = dict(zip(X.states.elements, f0))
        options = [Y.path_set(m[p[0]], m[p[1]]) for p in X.paths]
        if any(not o for o in options):
            continue
        chosen: list[Path] = [None] * len(X.paths)  # type: ignore[list-item]

        def extend(k):
            if k == len(options):
                result.append(FlowMorphism(X, Y, f0, tuple(chosen), _validated=False))
                return
            for q in options[k]:
                chosen[k] = q
                ok = True
                for ix, iy, iz in checks[k]:
                    fxy = Y.comp.get((chosen[ix], chosen[iy]))
                    if fxy != chosen[iz] and not (fxy is None and Y.truncated):
                        ok = False
                        break
                if ok:
                    extend(k + 1)

        extend(0)
    return tuple(result)


def is_isomorphic(X: Flow, Y: Flow, budget: int | None = None) -> bool:
    if len(X.states) != len(Y.states) or len(X.paths) != len(Y.paths):
        return False
    return any(f.is_bijective() for f in enumerate_morphisms(X, Y, budget))
