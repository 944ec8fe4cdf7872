"""Density operators, entropies and classical-quantum post-measurement states.

All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import BadDim, DimMismatch, InvalidState
from .linalg import PSD_TOL, HermitianOp, eig_hermitian, kron, partial_trace, sqrt_psd

if TYPE_CHECKING:
    from .povm import Povm

TRACE_TOL = 1e-10
ZERO_BRANCH = 1e-12


class DensityOp(HermitianOp):
    """Unit-trace positive semidefinite operator."""

    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {tr!r} is not 1 within {TRACE_TOL}")
        lo = eig_hermitian(self)[0][0]
        if lo < -PSD_TOL:
            raise InvalidState(f"minimum eigenvalue {lo:.3g} below {-PSD_TOL}")


def pure(ket) -> DensityOp:
    psi = np.asarray(ket, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return DensityOp(np.outer(psi, psi.conj()))


def maximally_mixed(dim: int = 2) -> DensityOp:
    return DensityOp(np.eye(dim) / dim)


def bloch_state(r) -> DensityOp:
    """Qubit state (I + r.sigma)/2 for |r| <= 1."""
    from .linalg import bloch_op

    return DensityOp(bloch_op(0.5, 0.5 * np.asarray(r, dtype=float)).mat)


def product(rho_a: DensityOp, rho_b: DensityOp) -> DensityOp:
    return DensityOp(kron(rho_a, rho_b).mat)


def singlet() -> DensityOp:
    """(|01> - |10>)/sqrt(2)."""
    return pure(np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0))


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: HermitianOp) -> float:
    w = eig_hermitian(rho)[0]
    w = np.where((w < 0.0) & (w >= -PSD_TOL), 0.0, w)
    return shannon_entropy(w)


def conditional_vn_entropy(rho_ab: DensityOp) -> float:
    """S(A|B) = S(rho_AB) - S(rho_B)."""
    if rho_ab.dim != 4:
        raise BadDim(f"need a two-qubit state, got dim {rho_ab.dim}")
    return von_neumann_entropy(rho_ab) - von_neumann_entropy(partial_trace(rho_ab, "B"))


@dataclass(frozen=True)
class CqBranch:
    label: int
    prob: float
    # None for branches with probability <= ZERO_BRANCH
    state: DensityOp | None


@dataclass(frozen=True)
class CqState:
    """Classical register of A's outcomes paired with B's conditional states."""

    branches: tuple[CqBranch, ...]

    @property
    def probs(self) -> np.ndarray:
        return np.array([b.prob for b in self.branches])

    def entropy(self) -> float:
        # block-diagonal structure: S = H(p) + sum_x p_x S(rho_x)
        s = shannon_entropy(self.probs)
        for b in self.branches:
            if b.state is not None:
                s += b.prob * von_neumann_entropy(b.state)
        return s


def unnormalised_branch(rho_ab: DensityOp, effect_a: HermitianOp) -> HermitianOp:
    """Tr_A[rho_AB (E (x) 1)], written in the manifestly Hermitian form."""
    root = kron(sqrt_psd(effect_a), HermitianOp(np.eye(2))).mat
    return partial_trace(HermitianOp(root @ rho_ab.mat @ root), "B")


def cq_post_measurement(rho_ab: DensityOp, povm_a: Povm) -> CqState:
    if rho_ab.dim != 4 or povm_a.dim != 2:
        raise DimMismatch("need a two-qubit state and a qubit POVM on A")
    branches = []
    for outcome in povm_a.outcomes:
        sigma = unnormalised_branch(rho_ab, outcome.effect.op)
        p = sigma.trace()
        if p <= ZERO_BRANCH:
            branches.append(CqBranch(outcome.label, max(p, 0.0), None))
        else:
            branches.append(CqBranch(outcome.label, p, DensityOp(sigma.mat / p)))
    total = sum(b.prob for b in branches)
    if abs(total - 1.0) > TRACE_TOL:
        raise InvalidState(f"branch probabilities sum to {total!r}")
    return CqState(tuple(branches))


def measured_conditional_entropy(rho_ab: DensityOp, povm_a: Povm) -> float:
    """S(E|B): conditional entropy of the cq state left by measuring A."""
    cq = cq_post_measurement(rho_ab, povm_a)
    return cq.entropy() - von_neumann_entropy(partial_trace(rho_ab, "B"))
