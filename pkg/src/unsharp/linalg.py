"""Dense Hermitian algebra for one and two qubits."""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import BadDim, EigenNonConvergence, NotHermitian, NotPSD, ResultDimUnsupported

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in PAULIS:
    _m.setflags(write=False)


class HermitianOp:
    """Immutable complex Hermitian matrix of dimension 2 or 4.

    Input that is Hermitian up to ``HERMITIAN_TOL`` (max-abs) is symmetrised
    as (H + H^dagger)/2; anything further off is rejected.
    """

    __slots__ = ("_mat",)

    def __init__(self, entries):
        m = np.array(entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] not in (2, 4):
            raise BadDim(f"dimension must be 2 or 4, got {m.shape[0]}")
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > HERMITIAN_TOL:
            raise NotHermitian(f"asymmetry {asym:.3g} exceeds {HERMITIAN_TOL}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._mat = m

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self._mat).real)

    def __add__(self, other: HermitianOp) -> HermitianOp:
        return HermitianOp(self._mat + other.mat)

    def __sub__(self, other: HermitianOp) -> HermitianOp:
        return HermitianOp(self._mat - other.mat)

    def __mul__(self, scalar: float) -> HermitianOp:
        return HermitianOp(self._mat * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> HermitianOp:
        return HermitianOp(self._mat / float(scalar))

    def __array__(self, dtype=None, copy=None):
        return self._mat.astype(dtype) if dtype is not None else self._mat

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self._mat - np.asarray(other))) <= atol)

    def __repr__(self) -> str:
        return f"HermitianOp(dim={self.dim}, {np.array2string(self._mat, precision=6)})"


def identity(dim: int = 2) -> HermitianOp:
    return HermitianOp(np.eye(dim))


def bloch_op(a: float, b) -> HermitianOp:
    """Qubit operator a*I + b.sigma."""
    b = np.asarray(b, dtype=float)
    return HermitianOp(a * np.eye(2) + b[0] * SIGMA_X + b[1] * SIGMA_Y + b[2] * SIGMA_Z)


def bloch_coords(op: HermitianOp) -> tuple[float, np.ndarray]:
    """Inverse of :func:`bloch_op`."""
    if op.dim != 2:
        raise BadDim("Bloch coordinates need a qubit operator")
    m = op.mat
    a = 0.5 * float(np.trace(m).real)
    b = np.array([0.5 * float(np.trace(p @ m).real) for p in PAULIS])
    return a, b


def _eig2(m: np.ndarray):
    a = m[0, 0].real
    d = m[1, 1].real
    off = m[0, 1]
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    r = np.hypot(half, abs(off))
    w = np.array([mean - r, mean + r])
    if r == 0.0:
        return w, np.eye(2, dtype=np.complex128)
    # the eigenvector only depends on the ratio half : off, so normalise first
    # (keeps subnormal inputs from underflowing)
    scale = max(abs(half), abs(off))
    h = half / scale
    o = complex(off.real / scale, off.imag / scale)
    rr = np.hypot(h, abs(o))
    # both rows of (H - lam) v = 0 give a candidate; take the better conditioned one
    u1 = np.array([o, -h - rr])
    u2 = np.array([h - rr, np.conj(o)])
    u = u1 if np.linalg.norm(u1) >= np.linalg.norm(u2) else u2
    u = u / np.linalg.norm(u)
    v = np.empty((2, 2), dtype=np.complex128)
    v[:, 0] = u
    v[:, 1] = [-np.conj(u[1]), np.conj(u[0])]
    return w, v


def eig_hermitian(h: HermitianOp) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors as columns.

    Closed form for qubits, cyclic complex Jacobi for two qubits.
    """
    m = h.mat if isinstance(h, HermitianOp) else np.asarray(h, dtype=np.complex128)
    if m.shape[0] == 2:
        return _eig2(m)
    w, v, sweeps = kernels.jacobi_eigh(np.ascontiguousarray(m), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise EigenNonConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return w, v


def eigvalsh(h: HermitianOp) -> np.ndarray:
    return eig_hermitian(h)[0]


def spectral_apply(h: HermitianOp, func) -> HermitianOp:
    w, v = eig_hermitian(h)
    return HermitianOp((v * func(w)) @ v.conj().T)


def sqrt_psd(h: HermitianOp) -> HermitianOp:
    w, v = eig_hermitian(h)
    if w[0] < -PSD_TOL:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3g} below {-PSD_TOL}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return HermitianOp((v * root) @ v.conj().T)


def trace_norm(a) -> float:
    """Sum of singular values, Tr sqrt(A^dagger A).

    Hermitian input uses |eigenvalues|; a raw square array (e.g. a product
    of two effect roots) goes through the eigenvalues of A^dagger A.
    """
    if isinstance(a, HermitianOp):
        return float(np.sum(np.abs(eig_hermitian(a)[0])))
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadDim(f"expected a square matrix, got shape {m.shape}")
    gram = HermitianOp(m.conj().T @ m)
    w = eig_hermitian(gram)[0]
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def kron(a: HermitianOp, b: HermitianOp) -> HermitianOp:
    if a.dim * b.dim > 4:
        raise ResultDimUnsupported(f"{a.dim}x{b.dim} exceeds two qubits")
    return HermitianOp(np.kron(a.mat, b.mat))


def _ptrace(m: np.ndarray, keep: str) -> np.ndarray:
    t = m.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijik->jk", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_trace(ab: HermitianOp, keep: str) -> HermitianOp:
    """Reduce a two-qubit operator to subsystem ``keep`` ('A' or 'B')."""
    if ab.dim != 4:
        raise BadDim(f"partial trace needs a two-qubit operator, got dim {ab.dim}")
    return HermitianOp(_ptrace(ab.mat, keep))
