"""Hot loops for set-level lifting checks.

Maps are encoded as int64 index tables: ``tab[k]`` is the codomain index of
domain element ``k``.  A square for left ``i: a→b`` and right ``p: x→y`` is a
pair (top ∈ x^a, bottom ∈ y^b) with p∘top = bottom∘i; it has a diagonal
filler iff top is constant on every fiber of ``i`` and bottom sends each
element with an empty ``i``-fiber into the image of ``p``.  Both backends
visit every top; the bottom is determined by the top on the image of ``i``
and unconstrained off it, so it is quantified per element.

Two interchangeable backends are provided: numba-compiled loops, and a
vectorised numpy path.  Set ``FLOWCALC_DISABLE_NUMBA=1`` to force numpy.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get("FLOWCALC_DISABLE_NUMBA", "").lower() not in (
    "1", "true", "yes")

# numpy path materialises at most this many top maps at once
_BLOCK = 1 << 20


def _llp_loops(i_tab, b, p_tab, x, y):
    # Every top is visited.  For a given top the bottom is forced on the image
    # of i (commutation) and free elsewhere, so the bottoms are quantified
    # element by element instead of being enumerated.
    a = i_tab.shape[0]
    first = np.full(b, -1, dtype=np.int64)
    for k in range(a):
        if first[i_tab[k]] < 0:
            first[i_tab[k]] = k
    n_free = 0
    for c in range(b):
        if first[c] < 0:
            n_free += 1
    if n_free > 0 and y == 0:
        return True  # no bottom map exists
    p_onto = True
    in_image = np.zeros(y, dtype=np.bool_)
    for e in range(x):
        in_image[p_tab[e]] = True
    for c in range(y):
        if not in_image[c]:
            p_onto = False
    top = np.zeros(a, dtype=np.int64)
    for t in range(x ** a):
        r = t
        for k in range(a - 1, -1, -1):
            top[k] = r % x
            r //= x
        commutes = True
        constant = True
        for k in range(a):
            j = top[first[i_tab[k]]]
            if top[k] != j:
                constant = False
                if p_tab[top[k]] != p_tab[j]:
                    commutes = False
                    break
        if not commutes:
            continue
        # a commuting square exists for this top
        if not constant:
            return False
        if n_free > 0 and not p_onto:
            return False
    return True


def _llp_matrix_loops(l_tabs, l_dom, l_cod, r_tabs, r_dom, r_cod):
    out = np.zeros((l_dom.shape[0], r_dom.shape[0]), dtype=np.bool_)
    for u in range(l_dom.shape[0]):
        for v in range(r_dom.shape[0]):
            out[u, v] = _llp_one(l_tabs[u, : l_dom[u]], l_cod[u], r_tabs[v, : r_dom[v]], r_dom[v], r_cod[v])
    return out


if NUMBA_ENABLED:
    _llp_one = numba.njit(cache=True)(_llp_loops)
    _llp_matrix_nb = numba.njit(cache=True)(_llp_matrix_loops)
else:
    _llp_one = _llp_loops
    _llp_matrix_nb = None


def _all_tables(n_values: int, length: int) -> np.ndarray:
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n_values == 0:
        return np.zeros((0, length), dtype=np.int64)
    grids = np.indices((n_values,) * length).reshape(length, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def llp_numpy(i_tab, b, p_tab, x, y) -> bool:
    """Vectorised twin of the compiled kernel."""
    i_tab = np.asarray(i_tab, dtype=np.int64)
    p_tab = np.asarray(p_tab, dtype=np.int64)
    a = i_tab.shape[0]
    first = np.full(b, -1, dtype=np.int64)
    for k in range(a - 1, -1, -1):
        first[i_tab[k]] = k
    n_free = int(np.sum(first < 0))
    if n_free and y == 0:
        return True
    p_onto = np.unique(p_tab).shape[0] == y
    tops = _all_tables(x, a)
    if tops.shape[0] == 0:
        return True
    lead = first[i_tab]
    for start in range(0, tops.shape[0], _BLOCK):
        blk = tops[start:start + _BLOCK]
        if a:
            constant = np.all(blk == blk[:, lead], axis=1)
            commutes = np.all(p_tab[blk] == p_tab[blk[:, lead]], axis=1)
        else:
            constant = commutes = np.ones(blk.shape[0], dtype=bool)
        if (commutes & ~constant).any():
            return False
        if n_free and not p_onto and commutes.any():
            return False
    return True


def set_llp(i_tab, b: int, p_tab, x: int, y: int) -> bool:
    """Does i: a→b have the LLP against p: x→y (both given as index tables)?"""
    i_tab = np.ascontiguousarray(i_tab, dtype=np.int64)
    p_tab = np.ascontiguousarray(p_tab, dtype=np.int64)
    if NUMBA_ENABLED:
        return bool(_llp_one(i_tab, b, p_tab, x, y))
    return llp_numpy(i_tab, b, p_tab, x, y)


def _pack(arrows):
    doms = np.array([len(t) for t, _ in arrows], dtype=np.int64)
    cods = np.array([c for _, c in arrows], dtype=np.int64)
    width = max([1, *doms.tolist()])
    tabs = np.zeros((len(arrows), width), dtype=np.int64)
    for k, (t, _) in enumerate(arrows):
        tabs[k, : len(t)] = t
    return tabs, doms, cods


def set_llp_matrix(lefts, rights, backend: str | None = None) -> np.ndarray:
    """Boolean matrix ``M[u, v]`` = lefts[u] has the LLP against rights[v].

    ``lefts`` and ``rights`` are sequences of (index table, codomain size).
    ``backend`` is "numba", "numpy" or None for the configured default.
    """
    if backend is None:
        backend = "numba" if NUMBA_ENABLED else "numpy"
    if backend == "numba":
        if not NUMBA_ENABLED:
            raise RuntimeError("numba backend is disabled")
        lt, ld, lc = _pack(lefts)
        rt, rd, rc = _pack(rights)
        return _llp_matrix_nb(lt, ld, lc, rt, rd, rc)
    out = np.zeros((len(lefts), len(rights)), dtype=bool)
    for u, (it, b) in enumerate(lefts):
        for v, (pt, y) in enumerate(rights):
            out[u, v] = llp_numpy(it, b, pt, len(pt), y)
    return out
