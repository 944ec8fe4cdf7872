"""Regenerate every headline number and compare it with its target."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import compat, moments, sampling, uncertainty
from .povm import X, Y, Z, Axis, noisy_spin, sharp_spin
from .states import conditional_vn_entropy, measured_conditional_entropy, singlet

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float
    ok: bool

    def as_dict(self) -> dict:
        return {"value": self.value, "expected": self.expected, "tol": self.tol, "ok": self.ok}


def _close(name, value, expected, tol) -> Check:
    value = float(value)
    return Check(name, value, float(expected), tol, bool(abs(value - expected) <= tol))


def _flag(name, ok) -> Check:
    return Check(name, float(bool(ok)), 1.0, 0.0, bool(ok))


THRESHOLD_SETS = {
    "pair-xz": ((X, Z), "full", 1 / SQRT2),
    "triple-xyz": ((X, Y, Z), "full", 1 / SQRT3),
    "trine-pair": (moments.trine_axes(), "pairwise", SQRT3 - 1),
    "trine-triple": (moments.trine_axes(), "full", 2 / 3),
}


def check_thresholds(cfg=None) -> list[Check]:
    out = []
    for name, (axes, mode, target) in THRESHOLD_SETS.items():
        res = compat.threshold(axes, mode, cfg)
        out.append(_close(f"threshold.{name}", res.eta, target, 5e-3))
    return out


def check_witness() -> list[Check]:
    problem = compat.problem_for_axes((X, Z), 0.70)
    rep = compat.solve_feasibility(problem)
    out = [_flag("witness.solver.feasible", rep.verdict is compat.Verdict.FEASIBLE)]
    if rep.witness is not None:
        w = compat.check_witness(problem, rep.witness, 1e-7, 1e-8)
        out.append(_close("witness.solver.marginal_error", w.marginal_error, 0.0, 1e-7))
        out.append(_close("witness.solver.effect_violation", max(w.effect_violation, 0.0), 0.0, 1e-8))
    canon = compat.canonical_pair_grand_povm(0.70)
    w = compat.check_witness(problem, canon, 1e-12, 1e-12)
    out.append(_close("witness.canonical.marginal_error", w.marginal_error, 0.0, 1e-12))
    out.append(_close("witness.canonical.effect_violation", max(w.effect_violation, 0.0), 0.0, 1e-12))
    return out


def random_pair_instances(count: int = 200, seed: int = 2024, band: float = 2e-3):
    """(axis1, axis2, eta) with eta at least ``band`` away from the analytic boundary."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a1 = Axis.of(rng.normal(size=3))
        a2 = Axis.of(rng.normal(size=3))
        eta = float(rng.uniform())
        if abs(eta - compat.pair_boundary_eta(a1.vec, a2.vec)) < band:
            continue
        out.append((a1, a2, eta))
    return out


def check_oracle(count: int = 200, seed: int = 2024) -> list[Check]:
    disagreements = 0
    for a1, a2, eta in random_pair_instances(count, seed):
        rep = compat.solve_feasibility(compat.problem_for_axes((a1, a2), eta))
        want = compat.pair_criterion_unbiased(eta * a1.vec, eta * a2.vec)
        if (rep.verdict is compat.Verdict.FEASIBLE) != want or rep.verdict is compat.Verdict.INDETERMINATE:
            disagreements += 1
    return [_close("oracle.disagreements", disagreements, 0, 0)]


def check_game() -> list[Check]:
    out = []
    for eta in (0.0, 0.25, 1 / SQRT2, 0.78, 0.9, 1.0):
        tx, tz = uncertainty.game_tables(eta)
        lhs = uncertainty.conditional_shannon(tx) + uncertainty.conditional_shannon(tz)
        closed = 2 * uncertainty.binary_entropy((1 + eta) / 2)
        out.append(_close(f"game.lhs[eta={eta:.6g}]", lhs, closed, 1e-9))
    out.append(_close("game.beating_threshold_2dp", round(uncertainty.beating_threshold(), 2), 0.78, 0.0))
    worst = min(uncertainty.run_game(eta).lhs for eta in np.arange(0.0, 1 / SQRT2 + 1e-6, 0.01))
    out.append(_flag("game.steering_holds_compatible_range", worst >= 1.0))
    return out


def check_memory_bound() -> list[Check]:
    rho = singlet()
    ax, az = sharp_spin(X), sharp_spin(Z)
    lhs = measured_conditional_entropy(rho, ax) + measured_conditional_entropy(rho, az)
    return [
        _close("memory.lhs", lhs, 0.0, 1e-9),
        _close("memory.rhs", uncertainty.memory_bound(rho, ax, az), 0.0, 1e-9),
        _close("memory.conditional_entropy", conditional_vn_entropy(rho), -1.0, 1e-10),
    ]


def check_moments(trine_threshold: float | None = None) -> list[Check]:
    out = []
    worst_corr = 0.0
    worst_eig = 0.0
    for eta in (0.0, 0.25, 0.5, 2 / 3, 0.8, 1.0):
        c = moments.trine_correlations(eta)
        worst_corr = max(worst_corr, *(abs(v + eta / 2) for v in (c.c12, c.c23, c.c13)))
        eig = moments.moment_eigenvalues(moments.build_moment_matrix(c))
        want = np.sort([(2 + eta) / 2] * 3 + [(2 - 3 * eta) / 2])
        worst_eig = max(worst_eig, float(np.max(np.abs(eig - want))))
    out.append(_close("moments.correlation_error", worst_corr, 0.0, 1e-12))
    out.append(_close("moments.eigenvalue_error", worst_eig, 0.0, 1e-12))
    pt = moments.positivity_threshold()
    out.append(_close("moments.positivity_threshold", pt, 2 / 3, 1e-4))
    if trine_threshold is None:
        trine_threshold = compat.threshold(moments.trine_axes(), "full").eta
    out.append(_close("moments.matches_compat_threshold", pt, trine_threshold, 5e-3))
    return out


def sampled_correlations(n: int = 10**6, seed: int = 20240601) -> dict:
    game_x, _ = uncertainty.game_tables(0.5)
    n1, n2, _ = moments.trine_axes()
    trine = moments.sequential_pair_table(moments.maximally_mixed(2), n1, n2, 0.5)
    out = {}
    for stream, (name, table) in enumerate((("game", game_x), ("trine", trine))):
        run = sampling.sample_table(table, n, seed, stream)
        out[name] = (table, run)
    return out


def check_monte_carlo(n: int = 10**6, seed: int = 20240601) -> list[Check]:
    out = []
    first = sampled_correlations(n, seed)
    for name, (table, run) in first.items():
        values = np.outer(table.labels_a, table.labels_b).ravel()
        sigma = sampling.sigma_mean(values, table.p.ravel(), n)
        analytic = moments.pair_correlation(table)
        out.append(_close(f"montecarlo.{name}.correlation", sampling.empirical_correlation(run), analytic, 4 * sigma))
    second = sampled_correlations(n, seed)
    same = all(np.array_equal(first[k][1].counts, second[k][1].counts) for k in first)
    out.append(_flag("montecarlo.deterministic", same))
    return out


def check_lgi() -> list[Check]:
    return [_close("lgi.maximum", moments.lgi_value(moments.CorrelationTriple(0.5, 0.5, -0.5)), 1.5, 0.0)]


def run_all() -> list[Check]:
    checks = check_thresholds()
    trine = next(c.value for c in checks if c.name == "threshold.trine-triple")
    return list(
        itertools.chain(
            checks,
            check_witness(),
            check_oracle(),
            check_game(),
            check_memory_bound(),
            check_moments(trine),
            check_monte_carlo(),
            check_lgi(),
        )
    )
