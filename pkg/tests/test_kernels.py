import json
import os
import subprocess
import sys

import numpy as np
import pytest

from unsharp import kernels
from unsharp._jit import NUMBA_ENABLED, backend_name
from unsharp.compat import marginal_constraints, problem_for_axes
from unsharp.moments import trine_axes
from unsharp.povm import X, Y, Z

from .conftest import random_hermitian

needs_numba = pytest.mark.skipif(not NUMBA_ENABLED, reason="numba backend disabled")


def solver_inputs(axes, eta):
    proj, offset = marginal_constraints(problem_for_axes(axes, eta)).projector()
    m = 2 ** len(axes)
    x0 = np.zeros(4 * m)
    x0[0::4] = 1.0 / m
    return proj, offset, x0


CASES = [((X, Z), 0.70), ((X, Z), 0.75), ((X, Y, Z), 0.55), ((X, Y, Z), 0.60), (trine_axes(), 0.66)]


@pytest.mark.parametrize("axes, eta", CASES)
def test_dykstra_loops_match_vectorised(axes, eta):
    args = solver_inputs(axes, eta) + (20000, 1e-8, 1e-5, 1e-12, 100)
    y1, r1, it1, s1 = kernels._dykstra_loops(*args)
    y2, r2, it2, s2 = kernels.dykstra_numpy(*args)
    assert (it1, s1) == (it2, s2)
    np.testing.assert_allclose(y1, y2, atol=1e-12)
    assert r1 == pytest.approx(r2, abs=1e-12)


@needs_numba
@pytest.mark.parametrize("axes, eta", CASES)
def test_dykstra_numba_matches_numpy(axes, eta):
    args = solver_inputs(axes, eta) + (20000, 1e-8, 1e-5, 1e-12, 100)
    y1, r1, it1, s1 = kernels.dykstra_numba(*args)
    y2, r2, it2, s2 = kernels.dykstra_numpy(*args)
    assert (it1, s1) == (it2, s2)
    np.testing.assert_allclose(y1, y2, atol=1e-12)


def _check_eigh(fn, a):
    w, v, sweeps = fn(a.copy(), 1e-14, 100)
    assert sweeps >= 0
    assert np.all(np.diff(w) >= 0)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-10)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-12)
    return w


def test_jacobi_paths(rng):
    fns = [kernels.jacobi_numpy, kernels._jacobi_loops] + ([kernels.jacobi_numba] if NUMBA_ENABLED else [])
    for _ in range(50):
        a = random_hermitian(rng, 4).mat
        ws = [_check_eigh(fn, a) for fn in fns]
        for w in ws[1:]:
            np.testing.assert_allclose(w, ws[0], atol=1e-12)


def test_jacobi_degenerate():
    a = np.diag([1.0, 1.0, 1.0, -0.5]).astype(np.complex128)
    w, _, sweeps = kernels.jacobi_eigh(a, 1e-14, 100)
    assert sweeps == 0
    np.testing.assert_array_equal(w, [-0.5, 1, 1, 1])


def test_jacobi_reports_nonconvergence(rng):
    a = random_hermitian(rng, 4).mat
    _, _, sweeps = kernels.jacobi_numpy(a, 1e-14, 0)
    assert sweeps == -1


def test_sampler_paths_agree():
    cdf = np.array([0.1, 0.35, 0.9, 1.0])
    state = np.uint64(kernels.splitmix64(42))
    c_ref, s_ref = kernels.sample_python(cdf, 20000, state)
    with np.errstate(over="ignore"):
        # uncompiled uint64 arithmetic wraps by design
        c_loop, s_loop = kernels._sample_loops(cdf, 20000, np.uint64(state))
    np.testing.assert_array_equal(c_ref, c_loop)
    assert int(s_ref) == int(s_loop)
    if NUMBA_ENABLED:
        c_jit, s_jit = kernels.sample_numba(cdf, 20000, np.uint64(state))
        np.testing.assert_array_equal(c_ref, c_jit)
        assert int(s_ref) == int(s_jit)


def test_backend_name():
    assert backend_name() == ("numba" if NUMBA_ENABLED else "numpy")


_PROBE = """
import json
from unsharp._jit import backend_name
from unsharp.compat import threshold
from unsharp.moments import trine_axes
from unsharp.sampling import sample_table
from unsharp.uncertainty import game_tables
from unsharp import kernels
print(json.dumps({
    "backend": backend_name(),
    "dykstra": kernels.dykstra.__name__,
    "eta": threshold(trine_axes(), "full").eta,
    "counts": sample_table(game_tables(0.5)[0], 50000, 7).counts.tolist(),
}))
"""


def _probe(disable):
    env = dict(os.environ)
    env.pop("UNSHARP_DISABLE_NUMBA", None)
    if disable:
        env["UNSHARP_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


@pytest.mark.slow
def test_env_flag_selects_fallback_with_same_results():
    plain = _probe(disable=False)
    fallback = _probe(disable=True)
    assert fallback["backend"] == "numpy"
    assert fallback["dykstra"] == "dykstra_numpy"
    assert fallback["eta"] == plain["eta"]
    assert fallback["counts"] == plain["counts"]


@pytest.mark.parametrize("tiny", [1e-320, 1e-200, 1e-30])
def test_jacobi_tiny_couplings(tiny):
    a = np.diag([0.5, 0.5, -1.0, 2.0]).astype(np.complex128)
    a[0, 1], a[1, 0] = tiny * (1 + 1j), tiny * (1 - 1j)
    fns = [kernels.jacobi_numpy, kernels._jacobi_loops] + ([kernels.jacobi_numba] if NUMBA_ENABLED else [])
    for fn in fns:
        with np.errstate(over="raise", invalid="raise", divide="raise", under="ignore"):
            w, v, sweeps = fn(a.copy(), 1e-14, 100)
        assert sweeps >= 0
        assert np.all(np.isfinite(v))
        np.testing.assert_allclose(w, [-1.0, 0.5, 0.5, 2.0], atol=1e-14)
