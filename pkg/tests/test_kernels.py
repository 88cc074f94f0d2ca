import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poisson_krieger import GroupModel, build_type_iii1
from poisson_krieger.kernels import _numpy

nb = pytest.importorskip("poisson_krieger.kernels._numba")

sides_st = st.lists(st.integers(1, 10**6), min_size=1, max_size=60).map(lambda x: np.array(x, dtype=np.int64))


@given(sides_st, st.lists(st.integers(-50, 50), min_size=1, max_size=3))
def test_symdiff_parity(sides, g):
    g = np.array(g, dtype=np.int64)
    assert np.array_equal(_numpy.symdiff_ratio_terms(sides, g), nb.symdiff_ratio_terms(sides, g))


@given(sides_st, st.integers(-10**6, 10**6))
def test_flux_parity_and_zero(sides, s):
    g = np.array([s], dtype=np.int64)
    a, b = _numpy.flux_brackets(sides, g), nb.flux_brackets(sides, g)
    assert np.array_equal(a, b) and not a.any()


def test_symdiff_matches_group_counts():
    G = GroupModel(2)
    sides = G.sides(30)
    g = np.array([3, -1], dtype=np.int64)
    ref = [G.symdiff_count((3, -1), n) / G.cardinality(n) for n in range(1, 31)]
    # 1 - prod(1 - a/L) cancels at large L
    assert np.allclose(nb.symdiff_ratio_terms(sides, g), ref, rtol=1e-12, atol=0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(-4, 4), st.lists(st.booleans(), min_size=20, max_size=20))
def test_cocycle_parity(seed, s, mask):
    from poisson_krieger.simulation import sample_configuration
    from poisson_krieger.simulation.cocycle import generator_table
    from poisson_krieger.simulation.configuration import block_arrays
    spec = build_type_iii1(0.5, 1 / 3, 64)
    om = sample_configuration(spec, 20, 4, seed=seed, samples=200)
    values, gen, power = generator_table(spec, 20)
    args = (om.sample, om.block - 1, om.coords, block_arrays(spec, 20)["side"], gen, power,
            np.array(mask), np.array([s], dtype=np.int64), om.n_samples, values.size)
    e1, n1 = _numpy.cocycle_exponents(*args)
    e2, n2 = nb.cocycle_exponents(*args)
    assert np.array_equal(e1, e2) and np.array_equal(n1, n2)


@given(st.integers(1, 30), st.integers(1, 40), st.integers(0, 2**32))
def test_log_density_parity(rows, cols, seed):
    rng = np.random.default_rng(seed)
    counts = rng.poisson(1.0, (rows, cols)).astype(np.int64)
    mmn = rng.normal(size=cols)
    ll = rng.normal(size=cols)
    a, b = _numpy.log_rn_density(counts, mmn, ll), nb.log_rn_density(counts, mmn, ll)
    assert np.allclose(a, b, rtol=0, atol=1e-12 * max(1.0, float(np.abs(a).max())))


def test_env_flag_selects_numpy_backend():
    code = "from poisson_krieger import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, POISSON_KRIEGER_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
