import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from unsharp.errors import BadDim, NotHermitian, NotPSD, ResultDimUnsupported
from unsharp.linalg import (
    SIGMA_X,
    SIGMA_Z,
    HermitianOp,
    eig_hermitian,
    identity,
    kron,
    partial_trace,
    sqrt_psd,
    trace_norm,
)
from unsharp.states import singlet

from .conftest import random_density, random_hermitian

PLUS_Z = np.diag([1.0, 0.0])
MINUS_Z = np.diag([0.0, 1.0])
PLUS_X = np.array([[0.5, 0.5], [0.5, 0.5]])

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def hermitian_from(re, im):
    m = re + 1j * im
    return HermitianOp((m + m.conj().T) / 2)


def test_constructor_symmetrises_float_noise():
    m = np.array([[1.0, 2.0 + 1e-13], [2.0, -1.0]])
    h = HermitianOp(m)
    assert h.mat[0, 1] == h.mat[1, 0]


@pytest.mark.parametrize(
    "bad",
    [np.array([[1.0, 2.0], [0.0, 1.0]]), np.ones((2, 3)), np.ones(4)],
)
def test_constructor_rejects_non_hermitian(bad):
    with pytest.raises(NotHermitian):
        HermitianOp(bad)


def test_constructor_rejects_unsupported_dim():
    with pytest.raises(BadDim):
        HermitianOp(np.eye(3))


def test_operator_is_read_only():
    h = HermitianOp(SIGMA_Z)
    with pytest.raises(ValueError):
        h.mat[0, 0] = 5


class TestEig:
    def test_pauli_z(self):
        w, _ = eig_hermitian(HermitianOp(SIGMA_Z))
        np.testing.assert_allclose(w, [-1, 1], atol=1e-15)

    def test_identity(self):
        w, v = eig_hermitian(identity(2))
        np.testing.assert_allclose(w, [1, 1])
        np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-15)

    def test_unit_bloch_vector_matches_characteristic_polynomial(self):
        m = (SIGMA_X + SIGMA_Z) / np.sqrt(2)
        # lambda^2 - tr(m) lambda + det(m) = 0
        roots = np.sort(np.roots([1.0, -np.trace(m).real, np.linalg.det(m).real]).real)
        w, _ = eig_hermitian(HermitianOp(m))
        np.testing.assert_allclose(w, roots, atol=1e-12)
        np.testing.assert_allclose(w, [-1, 1], atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 4])
    def test_reconstruction(self, rng, dim):
        for _ in range(100):
            h = random_hermitian(rng, dim)
            w, v = eig_hermitian(h)
            assert np.all(np.diff(w) >= 0)
            assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h.mat)) <= 1e-10
            assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) <= 1e-12

    def test_degenerate_four_by_four(self):
        h = HermitianOp(np.diag([2.0, 2.0, -1.0, -1.0]).astype(complex))
        w, v = eig_hermitian(h)
        np.testing.assert_allclose(w, [-1, -1, 2, 2])
        np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h.mat, atol=1e-14)

    def test_agrees_with_lapack(self, rng):
        for _ in range(50):
            h = random_hermitian(rng, 4)
            np.testing.assert_allclose(eig_hermitian(h)[0], np.linalg.eigvalsh(h.mat), atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(arrays(float, (4, 4), elements=finite), arrays(float, (4, 4), elements=finite))
    def test_reconstruction_property(self, re, im):
        h = hermitian_from(re, im)
        w, v = eig_hermitian(h)
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h.mat)) <= 1e-10 * max(1.0, np.abs(h.mat).max())


    @pytest.mark.parametrize("tiny", [1e-320, 5e-324, 1e-300])
    def test_qubit_subnormal_offdiagonal(self, tiny):
        # nearly-degenerate diagonal with a subnormal coupling must not produce nan vectors
        m = np.array([[0.3, tiny * (1 + 1j)], [tiny * (1 - 1j), 0.3]])
        with np.errstate(over="raise", invalid="raise", divide="raise", under="ignore"):
            w, v = eig_hermitian(HermitianOp(m))
        assert np.all(np.isfinite(v))
        np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(w, [0.3, 0.3], atol=1e-15)


class TestSqrtPsd:
    def test_scalar(self):
        r = sqrt_psd(HermitianOp(np.eye(2) / 2))
        np.testing.assert_allclose(r.mat, np.eye(2) / np.sqrt(2), atol=1e-15)

    def test_projector(self):
        np.testing.assert_allclose(sqrt_psd(HermitianOp(PLUS_X)).mat, PLUS_X, atol=1e-15)

    def test_spectral_function(self):
        e = 0.75 * PLUS_X + 0.25 * (np.eye(2) - PLUS_X)
        want = np.sqrt(0.75) * PLUS_X + 0.5 * (np.eye(2) - PLUS_X)
        np.testing.assert_allclose(sqrt_psd(HermitianOp(e)).mat, want, atol=1e-14)

    def test_clamps_float_noise(self):
        r = sqrt_psd(HermitianOp(np.diag([-5e-11, 1.0])))
        np.testing.assert_allclose(r.mat, np.diag([0.0, 1.0]))

    def test_rejects_negative(self):
        with pytest.raises(NotPSD):
            sqrt_psd(HermitianOp(np.diag([-1e-6, 1.0])))

    @pytest.mark.parametrize("dim", [2, 4])
    def test_square_reconstructs(self, rng, dim):
        for _ in range(50):
            h = HermitianOp(random_density(rng, dim) * rng.uniform(0.1, 5))
            r = sqrt_psd(h)
            assert np.max(np.abs(r.mat @ r.mat - h.mat)) <= 1e-9
            assert np.linalg.eigvalsh(r.mat)[0] >= -1e-12


class TestTraceNorm:
    def test_diagonal(self):
        assert trace_norm(HermitianOp(np.diag([1.0, -2.0]))) == pytest.approx(3.0, abs=1e-12)

    def test_rank_one_projector(self):
        assert trace_norm(HermitianOp(PLUS_X)) == pytest.approx(1.0, abs=1e-12)

    def test_non_hermitian_product(self):
        prod = sqrt_psd(HermitianOp(PLUS_X)).mat @ sqrt_psd(HermitianOp(PLUS_Z)).mat
        # rank one: |<x+|z+>| = 1/sqrt(2); also cross-check singular values
        overlap = abs(np.array([1, 1]) @ np.array([1, 0])) / np.sqrt(2)
        assert trace_norm(prod) == pytest.approx(overlap, abs=1e-12)
        assert trace_norm(prod) == pytest.approx(np.linalg.svd(prod, compute_uv=False).sum(), abs=1e-12)

    def test_unitary_invariance(self, rng):
        for _ in range(50):
            h = random_hermitian(rng, 4)
            _, u = eig_hermitian(random_hermitian(rng, 4))
            rotated = HermitianOp(u @ h.mat @ u.conj().T)
            assert abs(trace_norm(rotated) - trace_norm(h)) <= 1e-10

    def test_equals_sum_abs_eigenvalues(self, rng):
        h = random_hermitian(rng, 4)
        assert trace_norm(h) == pytest.approx(np.abs(np.linalg.eigvalsh(h.mat)).sum(), abs=1e-10)


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(identity(2), identity(2)).mat, np.eye(4))

    def test_block_layout(self):
        np.testing.assert_array_equal(kron(HermitianOp(SIGMA_Z), identity(2)).mat, np.diag([1, 1, -1, -1]))

    def test_projectors(self):
        got = kron(HermitianOp(PLUS_Z), HermitianOp(MINUS_Z)).mat
        want = np.zeros((4, 4))
        for ia in range(2):
            for ib in range(2):
                for ja in range(2):
                    for jb in range(2):
                        want[ia * 2 + ib, ja * 2 + jb] = PLUS_Z[ia, ja] * MINUS_Z[ib, jb]
        np.testing.assert_array_equal(got, want)
        np.testing.assert_array_equal(got, np.diag([0, 1, 0, 0]))

    def test_rejects_too_large(self):
        with pytest.raises(ResultDimUnsupported):
            kron(identity(4), identity(2))


class TestPartialTrace:
    def test_singlet_marginal(self):
        np.testing.assert_allclose(partial_trace(singlet(), "B").mat, np.eye(2) / 2, atol=1e-15)
        np.testing.assert_allclose(partial_trace(singlet(), "A").mat, np.eye(2) / 2, atol=1e-15)

    def test_product(self, rng):
        a = HermitianOp(random_density(rng, 2))
        b = HermitianOp(random_density(rng, 2) * 3.0)
        ab = kron(a, b)
        np.testing.assert_allclose(partial_trace(ab, "A").mat, a.mat * b.trace(), atol=1e-12)
        np.testing.assert_allclose(partial_trace(ab, "B").mat, b.mat * a.trace(), atol=1e-12)

    def test_branch_trace_explicit(self):
        rho = singlet().mat
        op = rho @ np.kron(PLUS_Z, np.eye(2))
        # Tr_A by explicit index sum
        reduced = np.zeros((2, 2), dtype=complex)
        for ib in range(2):
            for jb in range(2):
                for a in range(2):
                    reduced[ib, jb] += op[a * 2 + ib, a * 2 + jb]
        assert np.trace(reduced).real == pytest.approx(0.5, abs=1e-15)

    def test_trace_preserved(self, rng):
        for _ in range(20):
            h = random_hermitian(rng, 4)
            assert partial_trace(h, "A").trace() == pytest.approx(h.trace(), abs=1e-12)

    def test_rejects_qubit(self):
        with pytest.raises(BadDim):
            partial_trace(identity(2), "A")
