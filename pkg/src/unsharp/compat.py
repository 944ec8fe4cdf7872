"""Joint measurability of dichotomic qubit POVMs.

A collection of n two-outcome qubit POVMs is jointly measurable iff there is a
grand POVM G(x1..xn) whose marginals reproduce every member. Writing each grand
effect in Bloch form a*I + b.sigma turns positivity into the cone |b| <= a, so
the existence question becomes a second-order-cone feasibility problem over
4 * 2**n real unknowns. It is decided with Dykstra's alternating projections
between the affine marginal constraints and the effect cones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.linalg

from . import kernels
from .errors import EtaOutOfRange, InvalidPovm, MonotonicityViolation, UnsupportedArity
from .linalg import HermitianOp, bloch_coords, bloch_op
from .povm import Axis, Povm, noisy_spin

EFFECT_TOL = 1e-10


class Verdict(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"


_STATUS = {
    kernels.FEASIBLE: Verdict.FEASIBLE,
    kernels.INFEASIBLE: Verdict.INFEASIBLE,
    kernels.INDETERMINATE: Verdict.INDETERMINATE,
}


@dataclass(frozen=True)
class BlochEffect:
    """Qubit operator a*I + b.sigma; a valid effect iff |b| <= a and |b| <= 1 - a."""

    a: float
    b: tuple[float, float, float]

    @classmethod
    def from_op(cls, op: HermitianOp) -> BlochEffect:
        a, b = bloch_coords(op)
        return cls(a, tuple(float(c) for c in b))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.b)

    def op(self) -> HermitianOp:
        return bloch_op(self.a, self.b)

    def violation(self) -> float:
        r = float(np.linalg.norm(self.b))
        return max(r - self.a, r - (1.0 - self.a), 0.0)

    def is_valid(self, tol: float = EFFECT_TOL) -> bool:
        return self.violation() <= tol


@dataclass(frozen=True)
class GrandPovmProblem:
    """Targets: n in {2, 3} two-outcome qubit POVMs."""

    marginals: tuple[Povm, ...]

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) not in (2, 3):
            raise UnsupportedArity(f"need 2 or 3 observables, got {len(self.marginals)}")
        for p in self.marginals:
            if p.dim != 2 or len(p) != 2:
                raise UnsupportedArity("only two-outcome qubit POVMs are supported")

    @property
    def n(self) -> int:
        return len(self.marginals)

    @property
    def outcome_tuples(self) -> list[tuple[int, ...]]:
        """Grand outcomes lambda = (x1, ..., xn) in lexicographic canonical order."""
        return list(itertools.product(*(p.labels for p in self.marginals)))

    @property
    def n_vars(self) -> int:
        return 4 * 2**self.n


def problem_for_axes(axes: Sequence[Axis], eta: float) -> GrandPovmProblem:
    return GrandPovmProblem(tuple(noisy_spin(ax, eta) for ax in axes))


@dataclass(frozen=True)
class AffineSystem:
    """Deduplicated linear system A v = c over stacked Bloch coordinates."""

    matrix: np.ndarray
    rhs: np.ndarray
    n_raw_rows: int
    basis: np.ndarray  # orthonormal basis of the row space, one column per row
    consistency_residual: float

    @property
    def rank(self) -> int:
        return self.matrix.shape[0]

    def projector(self) -> tuple[np.ndarray, np.ndarray]:
        """(P, o) with proj(v) = P v + o, the orthogonal projection onto {A v = c}."""
        q = self.basis
        proj = np.eye(q.shape[0]) - q @ q.T
        offset = np.linalg.lstsq(self.matrix, self.rhs, rcond=None)[0]
        return proj, offset


def marginal_constraints(problem: GrandPovmProblem) -> AffineSystem:
    """Marginal equations sum_{lambda: lambda_i = x_i} G(lambda) = E_i(x_i) and completeness.

    The raw system has 4 rows per (observable, outcome) plus 4 completeness
    rows; the outcome rows of each observable already sum to completeness, so
    pivoted QR drops the dependent ones.
    """
    lams = problem.outcome_tuples
    nv = problem.n_vars
    rows, rhs = [], []
    for i, target in enumerate(problem.marginals):
        for outcome in target.outcomes:
            a, b = bloch_coords(outcome.effect.op)
            coords = (a, *b)
            for c in range(4):
                row = np.zeros(nv)
                for k, lam in enumerate(lams):
                    if lam[i] == outcome.label:
                        row[4 * k + c] = 1.0
                rows.append(row)
                rhs.append(coords[c])
    for c in range(4):
        row = np.zeros(nv)
        row[c::4] = 1.0
        rows.append(row)
        rhs.append(1.0 if c == 0 else 0.0)
    a_full = np.array(rows)
    c_full = np.array(rhs)

    q, r, piv = scipy.linalg.qr(a_full.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > 1e-10 * diag[0]))
    keep = np.sort(piv[:rank])
    a_red = a_full[keep]
    c_red = c_full[keep]
    x0 = np.linalg.lstsq(a_red, c_red, rcond=None)[0]
    consistency = float(np.max(np.abs(a_full @ x0 - c_full)))
    return AffineSystem(a_red, c_red, a_full.shape[0], q[:, :rank], consistency)


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 20000
    tol_feas: float = 1e-8
    tol_infeas: float = 1e-5
    stall_tol: float = 1e-12
    stall_window: int = 100


@dataclass(frozen=True)
class GrandPovm:
    """Grand effects keyed by outcome tuples, in canonical order."""

    outcomes: tuple[tuple[tuple[int, ...], BlochEffect], ...]

    def effect(self, lam: tuple[int, ...]) -> BlochEffect:
        for key, eff in self.outcomes:
            if key == tuple(lam):
                return eff
        raise KeyError(lam)

    def to_povm(self, check: bool = True) -> Povm:
        # grand outcomes carry no numeric value; zero keeps the canonical order
        return Povm([(k, 0.0, eff.op()) for k, (_, eff) in enumerate(self.outcomes)], check=check)

    def marginal(self, index: int, label: int) -> HermitianOp:
        total = np.zeros((2, 2), dtype=np.complex128)
        for lam, eff in self.outcomes:
            if lam[index] == label:
                total += eff.op().mat
        return HermitianOp(total)


@dataclass(frozen=True)
class FeasibilityReport:
    verdict: Verdict
    residual: float
    iterations: int
    witness: GrandPovm | None = None
    rank: int = 0


def solve_feasibility(problem: GrandPovmProblem, cfg: SolverConfig | None = None) -> FeasibilityReport:
    cfg = cfg or SolverConfig()
    system = marginal_constraints(problem)
    if system.consistency_residual > 1e-9:
        # targets are not complete POVMs; no grand POVM can exist
        return FeasibilityReport(Verdict.INFEASIBLE, system.consistency_residual, 0, None, system.rank)
    proj, offset = system.projector()
    m = 2**problem.n
    x_init = np.zeros(4 * m)
    x_init[0::4] = 1.0 / m
    y, residual, iterations, status = kernels.dykstra(
        proj, offset, x_init, cfg.max_iter, cfg.tol_feas, cfg.tol_infeas, cfg.stall_tol, cfg.stall_window
    )
    verdict = _STATUS[int(status)]
    witness = None
    if verdict is Verdict.FEASIBLE:
        coords = np.asarray(y).reshape(m, 4)
        witness = GrandPovm(
            tuple(
                (lam, BlochEffect(float(row[0]), (float(row[1]), float(row[2]), float(row[3]))))
                for lam, row in zip(problem.outcome_tuples, coords)
            )
        )
    return FeasibilityReport(verdict, float(residual), int(iterations), witness, system.rank)


@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    marginal_error: float
    effect_violation: float


def check_witness(
    problem: GrandPovmProblem, grand: GrandPovm, marginal_tol: float = 1e-7, effect_tol: float = 1e-8
) -> WitnessCheck:
    """Verify a grand POVM with dense matrices and LAPACK eigenvalues, independent of the solver."""
    mats = {lam: eff.op().mat for lam, eff in grand.outcomes}
    worst_eff = 0.0
    for m in mats.values():
        w = np.linalg.eigvalsh(m)
        worst_eff = max(worst_eff, -w[0], w[-1] - 1.0)
    worst_marg = 0.0
    for i, target in enumerate(problem.marginals):
        for outcome in target.outcomes:
            s = sum(m for lam, m in mats.items() if lam[i] == outcome.label)
            worst_marg = max(worst_marg, float(np.max(np.abs(s - outcome.effect.mat))))
    total = sum(mats.values())
    worst_marg = max(worst_marg, float(np.max(np.abs(total - np.eye(2)))))
    ok = worst_marg <= marginal_tol and worst_eff <= effect_tol
    return WitnessCheck(ok, worst_marg, float(worst_eff))


def pair_criterion_unbiased(b1, b2) -> bool:
    """Closed-form joint measurability of two unbiased dichotomic qubit observables.

    ``b1``, ``b2`` are observable Bloch vectors (eta * n for a noisy spin):
    compatible iff |b1 + b2| + |b1 - b2| <= 2.
    """
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    return bool(np.linalg.norm(b1 + b2) + np.linalg.norm(b1 - b2) <= 2.0 + 1e-12)


def pair_boundary_eta(n1, n2) -> float:
    """Largest eta for which the noisy spins along n1, n2 pass the pair criterion."""
    n1 = np.asarray(n1, dtype=float)
    n2 = np.asarray(n2, dtype=float)
    s = np.linalg.norm(n1 + n2) + np.linalg.norm(n1 - n2)
    return float(min(1.0, 2.0 / s))


def canonical_pair_grand_povm(eta: float) -> GrandPovm:
    """G(x, z) = (I + eta x sigma_x + eta z sigma_z)/4, valid for 0 <= eta <= 1/sqrt(2)."""
    eta = float(eta)
    if not 0.0 <= eta <= 1.0 / np.sqrt(2.0) + 1e-15:
        raise EtaOutOfRange(f"canonical pair grand POVM needs 0 <= eta <= 1/sqrt(2), got {eta}")
    return GrandPovm(
        tuple(
            ((x, z), BlochEffect(0.25, (0.25 * eta * x, 0.0, 0.25 * eta * z)))
            for x, z in itertools.product((1, -1), (1, -1))
        )
    )


@dataclass(frozen=True)
class Probe:
    eta: float
    verdict: Verdict
    residual: float
    iterations: int


@dataclass(frozen=True)
class ThresholdResult:
    eta: float
    lo: float
    hi: float
    probes: tuple[Probe, ...] = field(default_factory=tuple)

    def __float__(self) -> float:
        return self.eta


def _feasible_at(axes, eta, mode, cfg) -> Probe:
    if mode == "full":
        groups = [tuple(axes)]
    elif mode == "pairwise":
        groups = list(itertools.combinations(axes, 2))
    else:
        raise ValueError(f"mode must be 'pairwise' or 'full', got {mode!r}")
    worst = Probe(eta, Verdict.FEASIBLE, 0.0, 0)
    for group in groups:
        rep = solve_feasibility(problem_for_axes(group, eta), cfg)
        if rep.verdict is not Verdict.FEASIBLE:
            return Probe(eta, rep.verdict, rep.residual, rep.iterations)
        if rep.residual >= worst.residual:
            worst = Probe(eta, rep.verdict, rep.residual, rep.iterations)
    return worst


def check_monotone(probes: Sequence[Probe]) -> None:
    """Feasibility must be downward closed in eta."""
    ordered = sorted(probes, key=lambda p: p.eta)
    seen_bad = None
    for p in ordered:
        if p.verdict is Verdict.FEASIBLE and seen_bad is not None:
            raise MonotonicityViolation(f"feasible at eta={p.eta} above non-feasible eta={seen_bad}")
        if p.verdict is not Verdict.FEASIBLE and seen_bad is None:
            seen_bad = p.eta


def threshold(
    axes: Sequence[Axis], mode: str = "full", cfg: SolverConfig | None = None, gap: float = 1e-3
) -> ThresholdResult:
    """Bisect the largest compatible unsharpness on [0, 1].

    Indeterminate probes count as infeasible, so the estimate errs low.
    """
    axes = list(axes)
    if len(axes) not in (2, 3):
        raise UnsupportedArity(f"need 2 or 3 axes, got {len(axes)}")
    cfg = cfg or SolverConfig()
    probes = []
    top = _feasible_at(axes, 1.0, mode, cfg)
    probes.append(top)
    if top.verdict is Verdict.FEASIBLE:
        return ThresholdResult(1.0, 1.0, 1.0, tuple(probes))
    bottom = _feasible_at(axes, 0.0, mode, cfg)
    probes.append(bottom)
    if bottom.verdict is not Verdict.FEASIBLE:
        raise InvalidPovm("trivial (eta = 0) measurements reported incompatible")
    lo, hi = 0.0, 1.0
    while hi - lo > gap:
        mid = 0.5 * (lo + hi)
        probe = _feasible_at(axes, mid, mode, cfg)
        probes.append(probe)
        if probe.verdict is Verdict.FEASIBLE:
            lo = mid
        else:
            hi = mid
    check_monotone(probes)
    return ThresholdResult(0.5 * (lo + hi), lo, hi, tuple(probes))
