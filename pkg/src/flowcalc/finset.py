"""Finite sets, total maps between them, and the named morphism classes.

Elements are string labels kept in lexicographic order so that every
enumeration in the package is deterministic.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

MAX_UNIVERSE = 6
DEFAULT_UNIVERSE = 4


class UniverseTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FinSet:
    elements: tuple[str, ...]

    def __post_init__(self):
        elems = tuple(sorted(str(e) for e in self.elements))
        if len(set(elems)) != len(elems):
            raise ValueError(f"duplicate labels in {elems}")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, *labels) -> "FinSet":
        return cls(tuple(labels))

    @classmethod
    def standard(cls, n: int) -> "FinSet":
        """The set {"0", ..., "n-1"}."""
        return cls(tuple(str(k) for k in range(n)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, label) -> bool:
        return label in self._index

    @cached_property
    def _index(self) -> dict[str, int]:
        return {e: k for k, e in enumerate(self.elements)}

    def index(self, label: str) -> int:
        return self._index[label]

    def __repr__(self):
        return "{" + ",".join(self.elements) + "}"


EMPTY = FinSet(())


@dataclass(frozen=True)
class SetMap:
    """A total map; ``table[k]`` is the image of ``domain.elements[k]``."""

    domain: FinSet
    codomain: FinSet
    table: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != len(self.domain):
            raise ValueError("map table must assign exactly one value per domain element")
        for v in self.table:
            if v not in self.codomain:
                raise ValueError(f"{v!r} is not an element of the codomain {self.codomain}")

    @classmethod
    def from_dict(cls, domain: FinSet, codomain: FinSet, mapping: Mapping[str, str]) -> "SetMap":
        missing = [x for x in domain if x not in mapping]
        if missing:
            raise ValueError(f"map undefined on {missing}")
        return cls(domain, codomain, tuple(mapping[x] for x in domain))

    @classmethod
    def from_indices(cls, domain: FinSet, codomain: FinSet, idx: Iterable[int]) -> "SetMap":
        return cls(domain, codomain, tuple(codomain.elements[int(k)] for k in idx))

    @classmethod
    def identity(cls, s: FinSet) -> "SetMap":
        return cls(s, s, s.elements)

    def __call__(self, x: str) -> str:
        return self.table[self.domain.index(x)]

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.domain.elements, self.table))

    @cached_property
    def indices(self) -> np.ndarray:
        return np.array([self.codomain.index(v) for v in self.table], dtype=np.int64)

    def __matmul__(self, other: "SetMap") -> "SetMap":
        """``g @ f`` is the composite g∘f."""
        if other.codomain != self.domain:
            raise ValueError("maps are not composable")
        return SetMap(other.domain, self.codomain, tuple(self(v) for v in other.table))

    def image(self) -> set[str]:
        return set(self.table)

    def fiber(self, y: str) -> list[str]:
        return [x for x, v in zip(self.domain.elements, self.table) if v == y]

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == len(self.codomain)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self):
        body = ", ".join(f"{x}↦{v}" for x, v in zip(self.domain.elements, self.table))
        return f"SetMap({self.domain}→{self.codomain}: {body})"


def all_maps(domain: FinSet, codomain: FinSet) -> Iterator[SetMap]:
    """Every map domain → codomain, in lexicographic order of tables."""
    for values in itertools.product(codomain.elements, repeat=len(domain)):
        yield SetMap(domain, codomain, values)


# The three generators of the classification.
def map_R() -> SetMap:
    return SetMap(FinSet.standard(2), FinSet.standard(1), ("0", "0"))


def map_C() -> SetMap:
    return SetMap(EMPTY, FinSet.standard(1), ())


def map_C_plus() -> SetMap:
    return SetMap(FinSet.standard(1), FinSet.standard(2), ("0",))


# ---------------------------------------------------------------------------
# named classes


class Tag(str, enum.Enum):
    ALL = "All"
    ISO = "Iso"
    MONO = "Mono"
    EPI = "Epi"
    SPLIT_MONO = "SplitMono"
    EMPTY = "Empty"
    NON_EMPTY = "NonEmpty"

    def __str__(self):
        return self.value


def left_inverses(f: SetMap) -> Iterator[SetMap]:
    for g in all_maps(f.codomain, f.domain):
        if all(g(v) == x for x, v in zip(f.domain.elements, f.table)):
            yield g


def arrow_key(f: SetMap) -> tuple[int, int, tuple[int, ...]]:
    """Isomorphism invariant of an arrow: sizes plus sorted fiber cardinalities."""
    sizes = sorted((len(f.fiber(y)) for y in f.codomain), reverse=True)
    return len(f.domain), len(f.codomain), tuple(sizes)


def _classify(f: SetMap) -> frozenset[Tag]:
    tags = {Tag.ALL}
    mono, epi = f.is_injective(), f.is_surjective()
    if mono:
        tags.add(Tag.MONO)
    if epi:
        tags.add(Tag.EPI)
    if mono and epi:
        tags.add(Tag.ISO)
    if next(left_inverses(f), None) is not None:
        tags.add(Tag.SPLIT_MONO)
    tags.add(Tag.EMPTY if len(f.domain) == 0 else Tag.NON_EMPTY)
    return frozenset(tags)


@lru_cache(maxsize=None)
def _classify_key(key) -> frozenset[Tag]:
    return _classify(representative(key))


def classify_map(f: SetMap) -> frozenset[Tag]:
    """Exactly the tags whose predicate ``f`` satisfies.

    The tags are isomorphism invariant, so the result is cached per arrow
    isomorphism class.
    """
    return _classify_key(arrow_key(f))


class MapClass:
    """A named class of set maps: a tag, or a finite union/intersection of classes.

    >>> (MapClass.parse("Epi|Empty")).contains(map_C())
    True
    """

    def __init__(self, op: str, args: tuple):
        self.op = op
        self.args = args

    @classmethod
    def tag(cls, t) -> "MapClass":
        return cls("tag", (Tag(t),))

    @classmethod
    def parse(cls, text: str) -> "MapClass":
        # '|' binds looser than '&'; no parentheses needed for the classes in use
        alts = [a.strip() for a in text.split("|")]
        terms = []
        for alt in alts:
            factors = [cls.tag(_TAG_ALIASES.get(x.strip().lower(), x.strip()))
                       for x in alt.split("&")]
            terms.append(factors[0] if len(factors) == 1 else cls("and", tuple(factors)))
        return terms[0] if len(terms) == 1 else cls("or", tuple(terms))

    def __or__(self, other: "MapClass") -> "MapClass":
        return MapClass("or", (self, other))

    def __and__(self, other: "MapClass") -> "MapClass":
        return MapClass("and", (self, other))

    def contains(self, f: SetMap) -> bool:
        if self.op == "tag":
            return self.args[0] in classify_map(f)
        if self.op == "or":
            return any(a.contains(f) for a in self.args)
        return all(a.contains(f) for a in self.args)

    __call__ = contains

    @property
    def name(self) -> str:
        if self.op == "tag":
            return self.args[0].value
        sep = "∪" if self.op == "or" else "∩"
        return sep.join(a.name if a.op == "tag" else f"({a.name})" for a in self.args)

    def __repr__(self):
        return f"MapClass({self.name})"

    def __eq__(self, other):
        return isinstance(other, MapClass) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


_TAG_ALIASES = {t.value.lower(): t.value for t in Tag} | {
    "splitmono": "SplitMono", "split-mono": "SplitMono", "nonempty": "NonEmpty",
    "non-empty": "NonEmpty",
}

ALL = MapClass.tag(Tag.ALL)
ISO = MapClass.tag(Tag.ISO)
MONO = MapClass.tag(Tag.MONO)
EPI = MapClass.tag(Tag.EPI)
SPLIT_MONO = MapClass.tag(Tag.SPLIT_MONO)
EMPTY_DOMAIN = MapClass.tag(Tag.EMPTY)
NON_EMPTY = MapClass.tag(Tag.NON_EMPTY)


# ---------------------------------------------------------------------------
# retracts


def _injections(a: FinSet, x: FinSet) -> Iterator[SetMap]:
    for values in itertools.permutations(x.elements, len(a)):
        yield SetMap(a, x, values)


def _retractions(i: SetMap) -> Iterator[SetMap]:
    """All r with r∘i = id, for an injective i."""
    fixed = {v: x for x, v in zip(i.domain.elements, i.table)}
    free = [y for y in i.codomain if y not in fixed]
    for values in itertools.product(i.domain.elements, repeat=len(free)):
        mapping = dict(fixed)
        mapping.update(zip(free, values))
        yield SetMap.from_dict(i.codomain, i.domain, mapping)


def retract_witness(f: SetMap, g: SetMap):
    """Maps (i, r, j, s) exhibiting f as a retract of g in the arrow category, or None.

    f: A→B, g: X→Y; i: A→X, r: X→A, j: B→Y, s: Y→B with r∘i = id, s∘j = id,
    g∘i = j∘f and f∘r = s∘g.  Sections are injective, so only injections are
    tried for i and j; once (i, j, s) is fixed the choice of r splits into
    independent per-element constraints.
    """
    A, B, X, Y = f.domain, f.codomain, g.domain, g.codomain
    for i in _injections(A, X):
        for j in _injections(B, Y):
            if any(g(i(a)) != j(f(a)) for a in A):
                continue
            for s in _retractions(j):
                r_vals = {}
                fixed = {v: a for a, v in zip(A.elements, i.table)}
                for x in X:
                    if x in fixed:
                        r_vals[x] = fixed[x]
                        continue
                    candidates = f.fiber(s(g(x)))
                    if not candidates:
                        break
                    r_vals[x] = candidates[0]
                else:
                    r = SetMap.from_dict(X, A, r_vals)
                    return i, r, j, s
    return None


def is_retract(f: SetMap, g: SetMap) -> bool:
    return _is_retract_key(arrow_key(f), arrow_key(g))


@lru_cache(maxsize=None)
def _is_retract_key(kf, kg) -> bool:
    return retract_witness(representative(kf), representative(kg)) is not None


# ---------------------------------------------------------------------------
# bounded universe


def _partitions(total: int, parts: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of exactly ``parts`` non-negative ints summing to total."""
    if largest is None:
        largest = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, largest), -1, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def representative(key) -> SetMap:
    """The canonical arrow for an isomorphism key from :func:`arrow_key`."""
    a, b, fibers = key
    table = []
    for y, size in enumerate(fibers):
        table.extend([str(y)] * size)
    return SetMap(FinSet.standard(a), FinSet.standard(b), tuple(table))


def enumerate_universe(n: int = DEFAULT_UNIVERSE) -> list[SetMap]:
    """One arrow per isomorphism class of maps between sets of size ≤ n."""
    if n < 0:
        raise ValueError("cardinality bound must be non-negative")
    if n > MAX_UNIVERSE:
        raise UniverseTooLarge(f"universe bound {n} exceeds the cap {MAX_UNIVERSE}")
    return list(_universe(n))


@lru_cache(maxsize=None)
def _universe(n: int) -> tuple[SetMap, ...]:
    keys = []
    for a in range(n + 1):
        for b in range(n + 1):
            if b == 0 and a > 0:
                continue
            for fibers in _partitions(a, b):
                keys.append((a, b, fibers))
    arrows = [representative(k) for k in keys]
    arrows.sort(key=lambda f: (len(f.domain), len(f.codomain), f.table))
    return tuple(arrows)


def all_arrows(n: int) -> Iterator[SetMap]:
    """Every map between the standard sets of size ≤ n (not up to isomorphism)."""
    for a in range(n + 1):
        for b in range(n + 1):
            yield from all_maps(FinSet.standard(a), FinSet.standard(b))


# ---------------------------------------------------------------------------
# colimits of sets


class UnionFind:
    def __init__(self, n: int = 0):
        self.parent = list(range(n))
        self.size = [1] * n

    def add(self) -> int:
        self.parent.append(len(self.parent))
        self.size.append(1)
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        i, j = self.find(i), self.find(j)
        if i == j:
            return False
        if self.size[i] < self.size[j]:
            i, j = j, i
        self.parent[j] = i
        self.size[i] += self.size[j]
        return True

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for k in range(len(self.parent)):
            groups.setdefault(self.find(k), []).append(k)
        return sorted(groups.values(), key=lambda c: c[0])


def glue_labels(left: Iterable[str], right: Iterable[str], pairs: Iterable[tuple[str, str]]):
    """Quotient of left ⊔ right by the equivalence generated by ``pairs``.

    Returns (labels, left_map, right_map) where each map sends an original label
    to its class label.  A class is named after a left member if it has one,
    else after its first right member, primed until unique.
    """
    left, right = list(left), list(right)
    n = len(left)
    pos_l = {x: k for k, x in enumerate(left)}
    pos_r = {y: n + k for k, y in enumerate(right)}
    uf = UnionFind(n + len(right))
    for x, y in pairs:
        uf.union(pos_l[x], pos_r[y])
    names: dict[int, str] = {}
    used: set[str] = set()
    for cls in uf.classes():
        k = cls[0]
        base = left[k] if k < n else right[k - n]
        name = base
        while name in used:
            name += "'"
        used.add(name)
        for m in cls:
            names[m] = name
    labels = [names[uf.find(k)] for k in range(n + len(right))]
    left_map = {x: labels[pos_l[x]] for x in left}
    right_map = {y: labels[pos_r[y]] for y in right}
    return sorted(used), left_map, right_map


def pushout_sets(f: SetMap, g: SetMap) -> tuple[FinSet, SetMap, SetMap]:
    """Pushout of the span X ←f– Z –g→ Y, with its two legs."""
    if f.domain != g.domain:
        raise ValueError("span legs must share a domain")
    labels, lm, rm = glue_labels(f.codomain, g.codomain, ((f(z), g(z)) for z in f.domain))
    P = FinSet(tuple(labels))
    return P, SetMap.from_dict(f.codomain, P, lm), SetMap.from_dict(g.codomain, P, rm)
