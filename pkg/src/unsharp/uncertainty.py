"""Entropic uncertainty with and without quantum memory, and the steering game.

Alice measures sharp sigma_x or sigma_z on her half of a singlet; Bob measures
noisy versions with unsharpness eta and tries to guess her outcome. The sum of
conditional Shannon entropies H(X|X') + H(Z|Z') = 2 H[(1 + eta)/2] drops below
the memoryless bound of 1 bit only for eta above ~0.78, which lies outside the
range eta <= 1/sqrt(2) where Bob's two POVMs are jointly measurable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatch, EtaOutOfRange, NegativeProbability, POutOfRange
from .linalg import kron, sqrt_psd, trace_norm
from .povm import PROB_CLAMP, X, Z, Povm, noisy_spin, sharp_spin
from .states import DensityOp, conditional_vn_entropy, singlet

TABLE_SUM_TOL = 1e-10
GAME_TOL = 1e-9


@dataclass(frozen=True)
class JointProbTable:
    """p[i, j] over (labels_a[i], labels_b[j]); the labels double as outcome values."""

    labels_a: tuple[int, ...]
    labels_b: tuple[int, ...]
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (len(self.labels_a), len(self.labels_b)):
            raise DimMismatch(f"table shape {p.shape} does not match labels")
        if np.any(p < -PROB_CLAMP):
            raise NegativeProbability(f"table entry {p.min():.3g} is negative")
        p = np.where(p < 0.0, 0.0, p)
        if abs(p.sum() - 1.0) > TABLE_SUM_TOL:
            raise NegativeProbability(f"table sums to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "labels_a", tuple(int(v) for v in self.labels_a))
        object.__setattr__(self, "labels_b", tuple(int(v) for v in self.labels_b))
        object.__setattr__(self, "p", p)

    @property
    def marginal_a(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def marginal_b(self) -> np.ndarray:
        return self.p.sum(axis=0)

    def prob(self, xa: int, xb: int) -> float:
        return float(self.p[self.labels_a.index(xa), self.labels_b.index(xb)])


@dataclass(frozen=True)
class GameReport:
    eta: float
    lhs: float
    closed_form: float
    bound_no_memory: float
    bound_with_memory: float
    steering_violated: bool


def binary_entropy(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise POutOfRange(f"p must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def overlap_c(px: Povm, pz: Povm) -> float:
    """max over outcome pairs of the trace norm of sqrt(E_X(x)) sqrt(E_Z(z))."""
    if px.dim != pz.dim:
        raise DimMismatch(f"POVM dims {px.dim} and {pz.dim} differ")
    roots_x = [sqrt_psd(o.effect.op).mat for o in px.outcomes]
    roots_z = [sqrt_psd(o.effect.op).mat for o in pz.outcomes]
    return max(trace_norm(rx @ rz) for rx in roots_x for rz in roots_z)


def mu_bound(px: Povm, pz: Povm) -> float:
    return float(-2.0 * np.log2(overlap_c(px, pz)))


def memory_bound(rho_ab: DensityOp, px: Povm, pz: Povm) -> float:
    """-2 log2 C + S(A|B); negative for strongly entangled states."""
    return mu_bound(px, pz) + conditional_vn_entropy(rho_ab)


def joint_table(rho_ab: DensityOp, povm_a: Povm, povm_b: Povm) -> JointProbTable:
    """p(x, x') = Tr[rho_AB E_A(x) (x) E_B(x')]."""
    if rho_ab.dim != 4 or povm_a.dim != 2 or povm_b.dim != 2:
        raise DimMismatch("need a two-qubit state and qubit POVMs")
    p = np.empty((len(povm_a), len(povm_b)))
    for i, oa in enumerate(povm_a.outcomes):
        for j, ob in enumerate(povm_b.outcomes):
            p[i, j] = np.trace(rho_ab.mat @ kron(oa.effect.op, ob.effect.op).mat).real
    return JointProbTable(tuple(povm_a.labels), tuple(povm_b.labels), p)


def conditional_shannon(t: JointProbTable, condition_on: str = "B") -> float:
    """H(A|B) (or H(B|A)); conditioning outcomes of zero probability are skipped."""
    if condition_on == "B":
        p = t.p
    elif condition_on == "A":
        p = t.p.T
    else:
        raise ValueError(f"condition_on must be 'A' or 'B', got {condition_on!r}")
    h = 0.0
    for j in range(p.shape[1]):
        col = p[:, j]
        pb = col.sum()
        if pb <= 0.0:
            continue
        nz = col[col > 0.0]
        h -= float(np.sum(nz * np.log2(nz / pb)))
    return h


def entropic_game(rho_ab: DensityOp, alice: Sequence[Povm], bob: Sequence[Povm]) -> float:
    """Sum over paired settings of H(Alice | Bob) for arbitrary POVMs on each side."""
    return sum(conditional_shannon(joint_table(rho_ab, a, b)) for a, b in zip(alice, bob, strict=True))


def game_tables(eta: float) -> tuple[JointProbTable, JointProbTable]:
    """Singlet tables for (sharp sigma_x, noisy sigma_x) and (sharp sigma_z, noisy sigma_z)."""
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise EtaOutOfRange(f"eta must lie in [0, 1], got {eta}")
    rho = singlet()
    return (
        joint_table(rho, sharp_spin(X), noisy_spin(X, eta)),
        joint_table(rho, sharp_spin(Z), noisy_spin(Z, eta)),
    )


def run_game(eta: float) -> GameReport:
    tx, tz = game_tables(eta)
    lhs = conditional_shannon(tx) + conditional_shannon(tz)
    closed = 2.0 * binary_entropy(0.5 * (1.0 + eta))
    if abs(lhs - closed) > GAME_TOL:
        raise RuntimeError(f"table entropy {lhs!r} disagrees with 2H[(1+eta)/2] = {closed!r}")
    ax, az = sharp_spin(X), sharp_spin(Z)
    no_mem = mu_bound(ax, az)
    with_mem = memory_bound(singlet(), ax, az)
    return GameReport(float(eta), lhs, closed, no_mem, with_mem, lhs < no_mem - 1e-12)


def beating_threshold(tol: float = 1e-9) -> float:
    """Root of 2 H[(1 + eta)/2] = 1 on [0, 1] by bisection."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if 2.0 * binary_entropy(0.5 * (1.0 + mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
