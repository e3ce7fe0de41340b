import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowcalc import kernels
from flowcalc.finset import enumerate_universe

from flowgen import brute_set_llp

needs_numba = pytest.mark.skipif(not kernels.NUMBA_ENABLED, reason="numba backend disabled")


def packed(arrows):
    return [(f.indices, len(f.codomain)) for f in arrows]


@pytest.fixture(scope="module")
def universe3():
    return enumerate_universe(3)


def test_numpy_matrix_matches_brute_force(universe3):
    M = kernels.set_llp_matrix(packed(universe3), packed(universe3), backend="numpy")
    expected = np.array([[brute_set_llp(f, g) for g in universe3] for f in universe3])
    assert np.array_equal(M, expected)


@needs_numba
def test_numba_matches_numpy():
    U = enumerate_universe(4)
    a = kernels.set_llp_matrix(packed(U), packed(U), backend="numba")
    b = kernels.set_llp_matrix(packed(U), packed(U), backend="numpy")
    assert a.dtype == bool and np.array_equal(a, b)


@needs_numba
def test_numba_single_pair_matches_numpy(universe3):
    for f in universe3:
        for g in universe3:
            args = (f.indices, len(f.codomain), g.indices, len(g.domain), len(g.codomain))
            assert bool(kernels._llp_one(*args)) == kernels.llp_numpy(*args)


tables = st.integers(0, 3).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, max(n - 1, 0)), max_size=3 if n else 0)))


@settings(max_examples=200, deadline=None)
@given(tables, tables)
def test_set_llp_random_tables(i, p):
    from flowcalc.finset import FinSet, SetMap
    (b, it), (y, pt) = i, p
    f = SetMap.from_indices(FinSet.standard(len(it)), FinSet.standard(b), it)
    g = SetMap.from_indices(FinSet.standard(len(pt)), FinSet.standard(y), pt)
    got = kernels.set_llp(np.array(it, dtype=np.int64), b, np.array(pt, dtype=np.int64), len(pt), y)
    assert got == brute_set_llp(f, g)


def test_numba_backend_refused_when_disabled(monkeypatch):
    monkeypatch.setattr(kernels, "NUMBA_ENABLED", False)
    with pytest.raises(RuntimeError):
        kernels.set_llp_matrix([], [], backend="numba")


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, FLOWCALC_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from flowcalc import kernels; print(kernels.NUMBA_ENABLED)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
