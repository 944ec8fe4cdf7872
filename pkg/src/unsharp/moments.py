"""Sequential unsharp-sharp trine statistics and moment-matrix positivity.

Rows and columns of the moment matrix are ordered (1, x1x2, x2x3, x1x3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EtaOutOfRange, InvalidState, ZeroProbabilityBranch
from .linalg import HermitianOp, eig_hermitian
from .povm import Axis, luders_update, noisy_spin, outcome_distribution
from .states import DensityOp, maximally_mixed
from .uncertainty import JointProbTable

POSITIVITY_TOL = 1e-12


def trine_axes() -> tuple[Axis, Axis, Axis]:
    """Three coplanar unit vectors at 120 degrees."""
    return tuple(
        Axis((float(np.cos(2 * np.pi * k / 3)), float(np.sin(2 * np.pi * k / 3)), 0.0)) for k in range(3)
    )


def sequential_pair_table(
    rho: DensityOp, axis_first: Axis, axis_second: Axis, eta: float, eta_second: float = 1.0
) -> JointProbTable:
    """Outcome table of an unsharp measurement followed by a (by default sharp) one.

    The first measurement updates the state through the Lüders rule; the second
    is read off the updated state.
    """
    for e in (eta, eta_second):
        if not 0.0 <= e <= 1.0:
            raise EtaOutOfRange(f"eta must lie in [0, 1], got {e}")
    first = noisy_spin(axis_first, eta)
    second = noisy_spin(axis_second, eta_second)
    p = np.zeros((2, 2))
    for i, o in enumerate(first.outcomes):
        try:
            post, prob = luders_update(rho, o.effect)
        except ZeroProbabilityBranch:
            continue
        p[i] = prob * outcome_distribution(post, second)
    return JointProbTable(tuple(first.labels), tuple(second.labels), p)


def pair_correlation(t: JointProbTable) -> float:
    return float(np.asarray(t.labels_a) @ t.p @ np.asarray(t.labels_b))


@dataclass(frozen=True)
class CorrelationTriple:
    c12: float
    c23: float
    c13: float

    def __post_init__(self):
        for name in ("c12", "c23", "c13"):
            v = float(getattr(self, name))
            if not -1.0 - 1e-12 <= v <= 1.0 + 1e-12:
                raise InvalidState(f"{name}={v} outside [-1, 1]")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class MomentMatrix:
    m: np.ndarray


def build_moment_matrix(c: CorrelationTriple) -> MomentMatrix:
    a, b, d = c.c12, c.c23, c.c13
    m = np.array(
        [
            [1.0, a, b, d],
            [a, 1.0, d, b],
            [b, d, 1.0, a],
            [d, b, a, 1.0],
        ]
    )
    m.setflags(write=False)
    return MomentMatrix(m)


def moment_eigenvalues(mm: MomentMatrix) -> np.ndarray:
    return eig_hermitian(HermitianOp(mm.m))[0]


def closed_form_eigenvalues(c: CorrelationTriple) -> np.ndarray:
    """The four even sign patterns 1 +- c12 +- c23 +- c13, ascending."""
    a, b, d = c.c12, c.c23, c.c13
    return np.sort(np.array([1 + a - b - d, 1 - a + b - d, 1 - a - b + d, 1 + a + b + d]))


def lgi_value(c: CorrelationTriple) -> float:
    """Three-term Leggett-Garg combination; classical models keep it <= 1."""
    return c.c12 + c.c23 - c.c13


def trine_correlations(eta: float, rho: DensityOp | None = None, axes=None) -> CorrelationTriple:
    """<X1 X2>, <X2 X3>, <X1 X3> from unsharp-sharp sequential runs."""
    rho = rho if rho is not None else maximally_mixed(2)
    n1, n2, n3 = axes if axes is not None else trine_axes()
    return CorrelationTriple(
        pair_correlation(sequential_pair_table(rho, n1, n2, eta)),
        pair_correlation(sequential_pair_table(rho, n2, n3, eta)),
        pair_correlation(sequential_pair_table(rho, n1, n3, eta)),
    )


def is_positive(mm: MomentMatrix) -> bool:
    return bool(moment_eigenvalues(mm)[0] >= -POSITIVITY_TOL)


def positivity_threshold(axes=None, rho: DensityOp | None = None, tol: float = 1e-6) -> float:
    """Largest eta whose sequential-measurement moment matrix stays positive."""

    def positive(eta):
        return is_positive(build_moment_matrix(trine_correlations(eta, rho, axes)))

    if positive(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
