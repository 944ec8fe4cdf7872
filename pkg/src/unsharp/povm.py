"""Effects, POVMs, spin measurements and the Lüders state update."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    EtaOutOfRange,
    InvalidAxis,
    InvalidEffect,
    InvalidPovm,
    NegativeProbability,
    ZeroProbabilityBranch,
)
from .linalg import PSD_TOL, HermitianOp, bloch_op, eig_hermitian, sqrt_psd
from .states import DensityOp

COMPLETENESS_TOL = 1e-9
PROB_CLAMP = 1e-12
PROB_SUM_TOL = 1e-10


@dataclass(frozen=True)
class Axis:
    """Unit vector in R^3."""

    n: tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.n, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise InvalidAxis(f"axis must be a finite 3-vector, got {self.n!r}")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise InvalidAxis(f"axis {self.n!r} is not unit norm")
        object.__setattr__(self, "n", tuple(float(c) for c in v))

    @classmethod
    def of(cls, vec) -> Axis:
        """Normalise ``vec``; rejects the zero vector."""
        v = np.asarray(vec, dtype=float)
        norm = np.linalg.norm(v)
        if v.shape != (3,) or norm < 1e-12:
            raise InvalidAxis(f"cannot normalise {vec!r}")
        return cls(tuple(v / norm))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.n)


X = Axis((1.0, 0.0, 0.0))
Y = Axis((0.0, 1.0, 0.0))
Z = Axis((0.0, 0.0, 1.0))


class Effect:
    """Operator with 0 <= E <= 1 (eigenvalues checked to ``PSD_TOL``)."""

    __slots__ = ("op",)

    def __init__(self, op, check: bool = True):
        op = op if isinstance(op, HermitianOp) else HermitianOp(op)
        if check:
            w = eig_hermitian(op)[0]
            if w[0] < -PSD_TOL or w[-1] > 1.0 + PSD_TOL:
                raise InvalidEffect(f"eigenvalues {w} outside [0, 1]")
        self.op = op

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    def __repr__(self) -> str:
        return f"Effect({self.op!r})"


class Outcome(NamedTuple):
    label: int
    value: float
    effect: Effect


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    max_negativity: float
    completeness_residual: float


class Povm:
    """Ordered labelled effects summing to the identity.

    Outcomes are kept in descending ``value`` order (+1 before -1). Pass
    ``check=False`` to hold an invalid collection for :func:`validate`.
    """

    __slots__ = ("outcomes",)

    def __init__(self, outcomes: Sequence, check: bool = True):
        items = []
        for label, value, eff in outcomes:
            if not isinstance(eff, Effect):
                eff = Effect(eff, check=False)
            items.append(Outcome(int(label), float(value), eff))
        if len({o.label for o in items}) != len(items):
            raise InvalidPovm("outcome labels must be unique")
        if len({o.effect.op.dim for o in items}) != 1:
            raise InvalidPovm("effects must share one dimension")
        items.sort(key=lambda o: -o.value)
        self.outcomes = tuple(items)
        if check:
            rep = validate(self)
            if not rep.ok:
                raise InvalidPovm(
                    f"negativity {rep.max_negativity:.3g}, completeness residual {rep.completeness_residual:.3g}"
                )

    @property
    def dim(self) -> int:
        return self.outcomes[0].effect.op.dim

    @property
    def labels(self) -> list[int]:
        return [o.label for o in self.outcomes]

    @property
    def values(self) -> np.ndarray:
        return np.array([o.value for o in self.outcomes])

    def effect(self, label: int) -> Effect:
        for o in self.outcomes:
            if o.label == label:
                return o.effect
        raise KeyError(label)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __iter__(self):
        return iter(self.outcomes)

    def __repr__(self) -> str:
        return f"Povm(labels={self.labels})"


def validate(p: Povm) -> ValidationReport:
    worst = 0.0
    total = np.zeros((p.dim, p.dim), dtype=np.complex128)
    for o in p.outcomes:
        w = eig_hermitian(o.effect.op)[0]
        worst = max(worst, -w[0], w[-1] - 1.0)
        total += o.effect.mat
    residual = float(np.max(np.abs(total - np.eye(p.dim))))
    ok = worst <= PSD_TOL and residual <= COMPLETENESS_TOL
    return ValidationReport(ok, float(worst), residual)


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise EtaOutOfRange(f"eta must lie in [0, 1], got {eta}")
    return eta


def noisy_spin(axis: Axis, eta: float) -> Povm:
    """Dichotomic spin POVM with effects (I + eta x n.sigma)/2, x = +-1."""
    eta = _check_eta(eta)
    n = axis.vec
    return Povm([(x, x, bloch_op(0.5, 0.5 * eta * x * n)) for x in (1, -1)])


def sharp_spin(axis: Axis) -> Povm:
    return noisy_spin(axis, 1.0)


def dichotomic(a_plus: float, b_plus) -> Povm:
    """Two-outcome qubit POVM with E(+1) = a I + b.sigma and E(-1) = I - E(+1)."""
    plus = bloch_op(a_plus, b_plus)
    return Povm([(1, 1, plus), (-1, -1, HermitianOp(np.eye(2)) - plus)])


def _check_dims(rho: HermitianOp, p: Povm):
    if rho.dim != p.dim:
        raise DimMismatch(f"state dim {rho.dim} vs POVM dim {p.dim}")


def _clamp(prob: float) -> float:
    if prob < -PROB_CLAMP:
        raise NegativeProbability(f"probability {prob:.3g} is negative beyond float noise")
    return max(prob, 0.0)


def outcome_distribution(rho: DensityOp, p: Povm) -> np.ndarray:
    """p(x) = Tr[rho E(x)] in the POVM's outcome order."""
    _check_dims(rho, p)
    probs = np.array([_clamp(float(np.trace(rho.mat @ o.effect.mat).real)) for o in p.outcomes])
    if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
        raise InvalidPovm(f"outcome probabilities sum to {probs.sum()!r}")
    return probs


def expectation(rho: DensityOp, p: Povm) -> float:
    return float(np.dot(p.values, outcome_distribution(rho, p)))


def luders_update(rho: DensityOp, effect: Effect) -> tuple[DensityOp, float]:
    """Selective update sqrt(E) rho sqrt(E) / p with p = Tr[rho E]."""
    op = effect.op if isinstance(effect, Effect) else effect
    if rho.dim != op.dim:
        raise DimMismatch(f"state dim {rho.dim} vs effect dim {op.dim}")
    prob = float(np.trace(rho.mat @ op.mat).real)
    if prob <= PROB_CLAMP:
        raise ZeroProbabilityBranch(f"branch probability {prob:.3g}")
    root = sqrt_psd(op).mat
    return DensityOp(root @ rho.mat @ root / prob), prob


def luders_channel(rho: DensityOp, p: Povm) -> DensityOp:
    """Non-selective update: sum over outcomes of sqrt(E) rho sqrt(E)."""
    _check_dims(rho, p)
    out = np.zeros_like(rho.mat)
    for o in p.outcomes:
        root = sqrt_psd(o.effect.op).mat
        out = out + root @ rho.mat @ root
    return DensityOp(out)
