"""Weak factorization systems and model structures on finite sets.

Everything here is checked extensionally over a bounded universe of arrows
(one per isomorphism class, see :func:`flowcalc.finset.enumerate_universe`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .colimits import mediating_morphism, pushout
from .finset import (ALL, EMPTY_DOMAIN, EPI, ISO, MONO, NON_EMPTY, SPLIT_MONO, FinSet,
                     MapClass, SetMap, all_arrows, arrow_key, enumerate_universe, glue_labels,
                     is_retract, map_C, map_C_plus, map_R)
from .flows import BudgetExceeded, FlowMorphism
from .lifting import _cached_matrix, flow_squares, has_llp, lifting_witness, rlp_members, set_squares
from .serialize import arrow_summary, morphism_to_json

DEFAULT_STAGE_CAP = 16


class UnknownWfs(KeyError):
    pass


class Extensional:
    """A class given by an explicit list of arrows (compared up to isomorphism)."""

    def __init__(self, name: str, arrows: Sequence[SetMap] = (), keys=()):
        self.name = name
        self.keys = frozenset(arrow_key(f) for f in arrows) | frozenset(keys)

    def contains(self, f: SetMap) -> bool:
        return arrow_key(f) in self.keys

    __call__ = contains


ClassPredicate = Union[MapClass, Extensional]


NAMED_PAIRS: dict[str, tuple[MapClass, MapClass]] = {
    "iso-all": (ISO, ALL),
    "mono-epi": (MONO, EPI),
    "splitmono-epi+empty": (SPLIT_MONO, EPI | EMPTY_DOMAIN),
    "epi-mono": (EPI, MONO),
    "all-iso": (ALL, ISO),
    "iso+nonempty-iso+empty": (ISO | NON_EMPTY, ISO | EMPTY_DOMAIN),
}

# generating sets K with the closed forms of (cof(K), inj(K))
GENERATING_SETS: list[tuple[str, Callable[[], list[SetMap]], MapClass, MapClass]] = [
    ("{}", lambda: [], ISO, ALL),
    ("{C}", lambda: [map_C()], MONO, EPI),
    ("{C+}", lambda: [map_C_plus()], SPLIT_MONO, EPI | EMPTY_DOMAIN),
    ("{R}", lambda: [map_R()], EPI, MONO),
    ("{R,C}", lambda: [map_R(), map_C()], ALL, ISO),
    ("{R,C+}", lambda: [map_R(), map_C_plus()], ISO | NON_EMPTY, ISO | EMPTY_DOMAIN),
]


@dataclass(frozen=True)
class ModelStructureSpec:
    cof: ClassPredicate
    fib: ClassPredicate
    weq: ClassPredicate

    @property
    def name(self) -> str:
        return f"({self.cof.name}, {self.fib.name}, {self.weq.name})"


NINE_MODEL_STRUCTURES = [
    ModelStructureSpec(ALL, ALL, ISO),
    ModelStructureSpec(ALL, ISO | EMPTY_DOMAIN, ISO | NON_EMPTY),
    ModelStructureSpec(ALL, ISO, ALL),
    ModelStructureSpec(ISO, ALL, ALL),
    ModelStructureSpec(EPI, MONO, ALL),
    ModelStructureSpec(MONO, EPI, ALL),
    ModelStructureSpec(SPLIT_MONO, EPI | EMPTY_DOMAIN, ALL),
    ModelStructureSpec(ISO | NON_EMPTY, ISO | EMPTY_DOMAIN, ALL),
    ModelStructureSpec(MONO, EPI | EMPTY_DOMAIN, ISO | NON_EMPTY),
]


def resolve_pair(key: str) -> tuple[MapClass, MapClass]:
    try:
        return NAMED_PAIRS[key.lower()]
    except KeyError:
        raise UnknownWfs(key) from None


# ---------------------------------------------------------------------------
# factorizations


def _coproduct_fold(f: SetMap) -> tuple[SetMap, SetMap]:
    """X → X ⊔ Y followed by the fold (f, id_Y)."""
    X, Y = f.domain, f.codomain
    labels, inl, inr = glue_labels(X, Y, ())
    M = FinSet(tuple(labels))
    l = SetMap.from_dict(X, M, inl)
    back = {inl[x]: f(x) for x in X}
    back.update({inr[y]: y for y in Y})
    return l, SetMap.from_dict(M, Y, back)


def canonical_factorization(f: SetMap, pair: str) -> tuple[SetMap, SetMap]:
    """A factorization f = r∘l with l, r in the classes of a named pair."""
    key = pair.lower()
    if key not in NAMED_PAIRS:
        raise UnknownWfs(pair)
    X, Y = f.domain, f.codomain
    idX, idY = SetMap.identity(X), SetMap.identity(Y)
    if key == "iso-all":
        return idX, f
    if key == "all-iso":
        return f, idY
    if key == "epi-mono":
        image = FinSet(tuple(f.image()))
        return SetMap(X, image, f.table), SetMap(image, Y, image.elements)
    if key == "mono-epi":
        if len(X) == 0:
            return f, idY
        return _coproduct_fold(f)
    if key == "splitmono-epi+empty":
        return _coproduct_fold(f) if len(X) else (idX, f)
    # iso+nonempty-iso+empty
    return (f, idY) if len(X) else (idX, f)


@dataclass
class SoaResult:
    left: SetMap | FlowMorphism
    right: SetMap | FlowMorphism
    stages: int


def _relabel(labels: Sequence[str]) -> tuple[FinSet, dict[str, str]]:
    std = FinSet.standard(len(labels))
    return std, {lab: std.elements[k] for k, lab in enumerate(sorted(labels))}


def _soa_stage_sets(l: SetMap, r: SetMap, K: Sequence[SetMap]):
    # glue one copy of cod(k) per lifting problem
    Ecarrier = r.domain
    new, pairs, new_r = [], [], {}
    for k in K:
        if has_llp(k, r):
            continue
        for top, bottom in set_squares(k, r):
            tag = len(new)
            names = {c: f"#{tag}.{c}" for c in k.codomain}
            new.extend(names.values())
            new_r.update({names[c]: bottom(c) for c in k.codomain})
            pairs.extend((top(d), names[k(d)]) for d in k.domain)
    labels, lm, rm = glue_labels(Ecarrier, new, pairs)
    M, rename = _relabel(labels)
    q = SetMap.from_dict(Ecarrier, M, {e: rename[lm[e]] for e in Ecarrier})
    r_vals = {rename[lm[e]]: r(e) for e in Ecarrier}
    r_vals.update({rename[rm[n]]: new_r[n] for n in new})
    return q @ l, SetMap.from_dict(M, r.codomain, r_vals)


def _soa_stage_flows(l: FlowMorphism, r: FlowMorphism, K: Sequence[FlowMorphism], budget):
    problems = []
    for k in K:
        if has_llp(k, r, budget):
            continue
        problems.extend((k, top, bottom) for top, bottom in flow_squares(k, r, budget))
    q = FlowMorphism.identity(r.source)
    r_cur = r
    for k, top, bottom in problems:
        po = pushout(k, q @ top)
        _, _, leg2 = po.materialize()
        r_cur = mediating_morphism(po, (bottom, r_cur), check_unique=False)
        q = leg2 @ q
    return q @ l, r_cur


def soa_factorize(f, K: Sequence, max_stages: int = DEFAULT_STAGE_CAP, budget: int | None = None) -> SoaResult:
    """Small object argument, finite stages.

    Each stage glues a copy of cod(k), along top, for every lifting problem of
    every generator k that the current right map fails to lift against; it
    stops as soon as the right map has the RLP against all of K.  Raises
    BudgetExceeded (carrying the partial factorization) past ``max_stages``.
    """
    sets = isinstance(f, SetMap) and all(isinstance(k, SetMap) for k in K)
    if not sets:
        f = f if isinstance(f, FlowMorphism) else FlowMorphism.from_set_map(f)
        K = [k if isinstance(k, FlowMorphism) else FlowMorphism.from_set_map(k) for k in K]
        l, r = FlowMorphism.identity(f.source), f
    else:
        l, r = SetMap.identity(f.domain), f
    for stage in range(max_stages + 1):
        if all(has_llp(k, r, budget) for k in K):
            return SoaResult(l, r, stage)
        if stage == max_stages:
            break
        if sets:
            l, r = _soa_stage_sets(l, r, K)
        else:
            l, r = _soa_stage_flows(l, r, K, budget)
    raise BudgetExceeded(f"small object argument did not stabilise within {max_stages} stages",
                         partial=SoaResult(l, r, max_stages))


# ---------------------------------------------------------------------------
# verification


@dataclass
class WfsReport:
    name: str
    bound: int
    left_ok: bool
    right_ok: bool
    factorization_ok: bool | None
    witnesses: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.left_ok and self.right_ok and bool(self.factorization_ok)

    def to_dict(self) -> dict:
        return {"name": self.name, "universe_max": self.bound, "passed": self.passed,
                "left_is_llp_of_right": self.left_ok, "right_is_rlp_of_left": self.right_ok,
                "factorization": self.factorization_ok, "witnesses": self.witnesses}


def _bound(universe: Sequence[SetMap]) -> int:
    return max([0] + [max(len(f.domain), len(f.codomain)) for f in universe])


def _mask(pred: ClassPredicate, universe) -> np.ndarray:
    return np.array([pred.contains(u) for u in universe], dtype=bool)


def _square_json(sq) -> dict:
    return {"top": morphism_to_json(sq.top), "bottom": morphism_to_json(sq.bottom),
            "summary": f"top {arrow_summary(sq.top)}, bottom {arrow_summary(sq.bottom)}"}


def matching_pair(L: ClassPredicate, R: ClassPredicate, universe) -> str | None:
    """The named pair extensionally equal to (L, R) over the universe, if any."""
    lm, rm = _mask(L, universe), _mask(R, universe)
    for key, (nl, nr) in NAMED_PAIRS.items():
        if np.array_equal(lm, _mask(nl, universe)) and np.array_equal(rm, _mask(nr, universe)):
            return key
    return None


def _judges(L, R, key, lefts, rights, bound):
    """Membership tests for factors, which may be larger than the universe.

    Extensional classes only know arrows up to the bound, so beyond it a
    factor is judged by the matching named pair, or failing that by lifting
    against the universe members of the opposite class.
    """
    if key is not None:
        return NAMED_PAIRS[key]

    def fits(f):
        return max(len(f.domain), len(f.codomain)) <= bound

    def in_L(f):
        if isinstance(L, MapClass) or fits(f):
            return L.contains(f)
        return all(has_llp(f, r) for r in rights)

    def in_R(f):
        if isinstance(R, MapClass) or fits(f):
            return R.contains(f)
        return all(has_llp(l, f) for l in lefts)

    return in_L, in_R


def verify_wfs(L: ClassPredicate, R: ClassPredicate, universe: Sequence[SetMap],
               name: str | None = None) -> WfsReport:
    """Check (L, R) is a weak factorization system over the universe.

    (a) u ∈ L iff u ⧄ r for every r ∈ R; (b) dually for R; (c) every arrow
    factors as r∘l.  (c) uses the canonical factorization when (L, R) agrees
    with a named pair, otherwise the small object argument on K = L; it is
    only attempted when (a) and (b) hold.  Factors bigger than the universe
    are judged as described in :func:`_judges`.
    """
    U = list(universe)
    bound = _bound(U)
    name = name or f"({L.name}, {R.name})"
    M = _cached_matrix(tuple(U), tuple(U))
    lm, rm = _mask(L, U), _mask(R, U)
    witnesses: list[dict] = []

    left_ok = True
    for a, u in enumerate(U):
        lifts = bool(M[a, rm].all())
        if lifts == lm[a]:
            continue
        left_ok = False
        if lm[a]:
            b = int(np.flatnonzero(rm & ~M[a])[0])
            sq = lifting_witness(u, U[b])
            witnesses.append({"check": "left", "reason": f"member of {L.name} without the LLP against "
                                                         f"a member of {R.name}",
                              "arrow": arrow_summary(u), "against": arrow_summary(U[b]),
                              "square": _square_json(sq)})
        else:
            witnesses.append({"check": "left", "reason": f"has the LLP against {R.name} but is not in {L.name}",
                              "arrow": arrow_summary(u)})

    right_ok = True
    for b, v in enumerate(U):
        lifts = bool(M[lm, b].all())
        if lifts == rm[b]:
            continue
        right_ok = False
        if rm[b]:
            a = int(np.flatnonzero(lm & ~M[:, b])[0])
            sq = lifting_witness(U[a], v)
            witnesses.append({"check": "right", "reason": f"member of {R.name} without the RLP against "
                                                          f"a member of {L.name}",
                              "arrow": arrow_summary(v), "against": arrow_summary(U[a]),
                              "square": _square_json(sq)})
        else:
            witnesses.append({"check": "right", "reason": f"has the RLP against {L.name} but is not in {R.name}",
                              "arrow": arrow_summary(v)})

    fact_ok: bool | None = None
    if left_ok and right_ok:
        fact_ok = True
        key = matching_pair(L, R, U)
        generators = [u for u, keep in zip(U, lm) if keep]
        rights = [u for u, keep in zip(U, rm) if keep]
        in_L, in_R = _judges(L, R, key, generators, rights, bound)
        for u in U:
            try:
                if key is not None:
                    l, r = canonical_factorization(u, key)
                else:
                    res = soa_factorize(u, generators)
                    l, r = res.left, res.right
            except BudgetExceeded:
                fact_ok = False
                witnesses.append({"check": "factorization", "reason": "small object argument did not stabilise",
                                  "arrow": arrow_summary(u)})
                continue
            if r @ l != u or not in_L(l) or not in_R(r):
                fact_ok = False
                witnesses.append({"check": "factorization", "reason": "factors outside the classes",
                                  "arrow": arrow_summary(u), "l": arrow_summary(l), "r": arrow_summary(r)})
    return WfsReport(name, bound, left_ok, right_ok, fact_ok, witnesses)


def _composable_pairs(n: int):
    by_shape: dict[tuple[int, int], list[SetMap]] = {}
    for f in all_arrows(n):
        by_shape.setdefault((len(f.domain), len(f.codomain)), []).append(f)
    for (a, b), fs in sorted(by_shape.items()):
        for c in range(n + 1):
            for g in by_shape.get((b, c), []):
                for f in fs:
                    yield f, g


def two_out_of_three_witness(W: ClassPredicate, n: int) -> dict | None:
    """A composable pair (f, g) among maps of size ≤ n violating two-out-of-three."""
    memo: dict = {}

    def w(h):
        k = arrow_key(h)
        if k not in memo:
            memo[k] = W.contains(h)
        return memo[k]

    for f, g in _composable_pairs(n):
        flags = (w(f), w(g), w(g @ f))
        if sum(flags) == 2:
            missing = ("f", "g", "g∘f")[flags.index(False)]
            return {"f": arrow_summary(f), "g": arrow_summary(g), "g∘f": arrow_summary(g @ f),
                    "missing": missing}
    return None


def retract_closure_witness(W: ClassPredicate, universe: Sequence[SetMap]) -> dict | None:
    for v in universe:
        if not W.contains(v):
            continue
        for u in universe:
            if not W.contains(u) and is_retract(u, v):
                return {"retract": arrow_summary(u), "of": arrow_summary(v)}
    return None


@dataclass
class ModelStructureReport:
    name: str
    bound: int
    two_of_three: dict | None
    retract: dict | None
    trivial_cofibrations: WfsReport
    cofibrations: WfsReport

    @property
    def passed(self) -> bool:
        return (self.two_of_three is None and self.retract is None
                and self.trivial_cofibrations.passed and self.cofibrations.passed)

    def to_dict(self) -> dict:
        return {"name": self.name, "universe_max": self.bound, "passed": self.passed,
                "two_out_of_three_violation": self.two_of_three, "retract_violation": self.retract,
                "trivial_cofibration_wfs": self.trivial_cofibrations.to_dict(),
                "cofibration_wfs": self.cofibrations.to_dict()}


def verify_model_structure(spec: ModelStructureSpec, universe: Sequence[SetMap]) -> ModelStructureReport:
    U = list(universe)
    n = _bound(U)
    W = spec.weq
    tc = verify_wfs(spec.cof & W, spec.fib, U, name=f"({spec.cof.name}∩{W.name}, {spec.fib.name})")
    c = verify_wfs(spec.cof, spec.fib & W, U, name=f"({spec.cof.name}, {spec.fib.name}∩{W.name})")
    return ModelStructureReport(spec.name, n, two_out_of_three_witness(W, n),
                                retract_closure_witness(W, U), tc, c)


def cof_membership(f: SetMap, K: Sequence[SetMap], universe: Sequence[SetMap]) -> bool:
    """Does f lift against every arrow of the universe that has the RLP against K?

    Exact for the six generating sets of :data:`GENERATING_SETS` once the
    universe is large enough to contain separating witnesses; an
    approximation from above otherwise.
    """
    return all(has_llp(f, p) for p in rlp_members(K, universe))


# ---------------------------------------------------------------------------
# the nine candidate restrictions

ROWS = [("Iso", "All"), ("Mono", "Epi"), ("SplitMono", "Epi|Empty")]
COLUMNS = [("Epi", "Mono"), ("All", "Iso"), ("Iso|NonEmpty", "Iso|Empty")]


def _first(pred, arrows):
    return next((f for f in arrows if pred(f)), None)


def _identify(keys: frozenset, universe) -> str:
    for cls in (ISO, MONO, EPI, SPLIT_MONO, ALL, ISO | EMPTY_DOMAIN, SPLIT_MONO | EMPTY_DOMAIN,
                ISO | NON_EMPTY, EPI | EMPTY_DOMAIN):
        if all((arrow_key(u) in keys) == cls.contains(u) for u in universe):
            return cls.name
    return "unnamed"


def analyze_cell(row: tuple[str, str], col: tuple[str, str], n: int = 3) -> dict:
    """Decide one cell: row = (Cof∩W, Fib), column = (Cof, Fib∩W).

    Reports every failure mode found: "inclusion" (Cof∩W ⊄ Cof or
    Fib∩W ⊄ Fib), "two-of-three" (the class W generated as composites
    (Fib∩W)∘(Cof∩W) is not two-out-of-three), and "column" (Fib∩W contains
    every empty-domain map, which forces W = All, and then Cof∩W ≠ Cof).
    """
    tcof, fib = (MapClass.parse(x) for x in row)
    cof, tfib = (MapClass.parse(x) for x in col)
    U = enumerate_universe(n)
    modes: list[dict] = []

    bad = _first(lambda u: tcof(u) and not cof(u), U)
    if bad is not None:
        modes.append({"mode": "inclusion", "claim": f"{tcof.name} ⊄ {cof.name}", "witness": arrow_summary(bad)})
    bad = _first(lambda u: tfib(u) and not fib(u), U)
    if bad is not None:
        modes.append({"mode": "inclusion", "claim": f"{tfib.name} ⊄ {fib.name}", "witness": arrow_summary(bad)})

    weq_name = None
    if not modes:
        arrows = list(all_arrows(n))
        lefts = [f for f in arrows if tcof(f)]
        rights = [g for g in arrows if tfib(g)]
        keys = frozenset(arrow_key(g @ f) for f in lefts for g in rights if g.domain == f.codomain)
        weq_name = _identify(keys, U)
        W = Extensional(weq_name, keys=keys)
        wit = two_out_of_three_witness(W, n)
        if wit is not None:
            modes.append({"mode": "two-of-three", "claim": f"W = {weq_name}", "witness": wit})

    if all(tfib(u) for u in U if len(u.domain) == 0):
        # ∅ → X and ∅ → Y are both weak equivalences, so any X → Y is one
        forced = _first(lambda u: cof(u) and not tcof(u), U)
        if forced is not None:
            modes.append({"mode": "column", "claim": f"W = All forces {row[0]} = {col[0]}",
                          "witness": arrow_summary(forced)})
    return {"row": row, "column": col, "weq": weq_name, "possible": not modes, "modes": modes}


def last_nine_table(n: int = 3) -> list[dict]:
    return [analyze_cell(row, col, n) for row in ROWS for col in COLUMNS]
