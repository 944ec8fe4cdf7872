"""Command-line front end.

Exit codes: 0 ok, 2 usage error, 3 indeterminate solver verdict,
4 tolerance failure in ``repro-all``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, compat, moments, repro, sampling, uncertainty
from .errors import UnsharpError
from .povm import Axis

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3
EXIT_TOLERANCE = 4

SIG_DIGITS = 12


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": _round(self.inputs),
            "results": _round(self.results),
            "meta": {"version": __version__, "seed": self.meta.get("seed")},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in _flatten(self.as_dict()["results"]):
            writer.writerow([key, _scalar_text(value)])
        return buf.getvalue()


def _round(obj):
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0.0 else x
    return obj


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}.{i}")
    else:
        yield prefix, obj


def _scalar_text(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_axes(text: str) -> list[Axis]:
    """'x1,y1,z1;x2,y2,z2[;...]' -> normalised axes."""
    axes = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [float(v) for v in chunk.split(",")]
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"axis {chunk!r} needs three components")
        axes.append(Axis.of(parts))
    return axes


def _axes_arg(text):
    try:
        return parse_axes(text)
    except (ValueError, UnsharpError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return v


def _sweep(text):
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("sweep must be a:b:step") from exc
    if step <= 0 or not 0.0 <= a <= b <= 1.0:
        raise argparse.ArgumentTypeError("sweep needs 0 <= a <= b <= 1 and step > 0")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def _solver_cfg(args) -> compat.SolverConfig:
    return compat.SolverConfig(max_iter=args.max_iter, tol_feas=args.tol_feas, tol_infeas=args.tol_infeas)


def _bloch_dict(grand: compat.GrandPovm) -> list[dict]:
    return [{"outcome": list(lam), "a": eff.a, "b": list(eff.b)} for lam, eff in grand.outcomes]


def cmd_thresholds(args) -> tuple[Report, int]:
    if args.axes is not None:
        axes, mode, label = args.axes, args.mode, "custom"
        if len(axes) not in (2, 3):
            raise UnsharpError("thresholds needs 2 or 3 axes")
    else:
        axes, mode, _ = repro.THRESHOLD_SETS[args.set]
        label = args.set
    res = compat.threshold(axes, mode, _solver_cfg(args), gap=args.gap)
    results = {
        "eta_star": res.eta,
        "bracket": [res.lo, res.hi],
        "probe_count": len(res.probes),
        "probes": [
            {"eta": p.eta, "verdict": p.verdict.value, "residual": p.residual, "iterations": p.iterations}
            for p in res.probes
        ],
    }
    inputs = {"set": label, "mode": mode, "axes": [list(a.n) for a in axes], "gap": args.gap}
    return Report("thresholds", inputs, results), EXIT_OK


def _game_entry(eta, samples, seed):
    rep = uncertainty.run_game(eta)
    entry = {
        "eta": eta,
        "lhs": rep.lhs,
        "closed_form": rep.closed_form,
        "bound_no_memory": rep.bound_no_memory,
        "bound_with_memory": rep.bound_with_memory,
        "steering_violated": rep.steering_violated,
    }
    if samples:
        tx, tz = uncertainty.game_tables(eta)
        rx = sampling.sample_table(tx, samples, seed, 0)
        rz = sampling.sample_table(tz, samples, seed, 1)
        hx = sampling.empirical_conditional_entropy(rx)
        hz = sampling.empirical_conditional_entropy(rz)
        entry["empirical"] = {
            "H_X_given_Xp": hx,
            "H_Z_given_Zp": hz,
            "lhs": hx + hz,
            "corr_x": sampling.empirical_correlation(rx),
            "corr_z": sampling.empirical_correlation(rz),
        }
    return entry


def cmd_game(args) -> tuple[Report, int]:
    etas = args.sweep if args.sweep else [args.eta]
    entries = [_game_entry(eta, args.samples, args.seed) for eta in etas]
    results = entries[0] if len(entries) == 1 else {"sweep": entries}
    results["beating_threshold"] = uncertainty.beating_threshold()
    inputs = {"eta": args.eta, "sweep": etas if args.sweep else None, "samples": args.samples}
    return Report("game", inputs, results, {"seed": args.seed if args.samples else None}), EXIT_OK


def cmd_moments(args) -> tuple[Report, int]:
    eta = args.eta
    c = moments.trine_correlations(eta)
    mm = moments.build_moment_matrix(c)
    eig = moments.moment_eigenvalues(mm)
    results = {
        "correlations": {"c12": c.c12, "c23": c.c23, "c13": c.c13},
        "matrix": mm.m.tolist(),
        "eigenvalues": eig.tolist(),
        "min_eigenvalue": float(eig[0]),
        "positive": bool(eig[0] >= -moments.POSITIVITY_TOL),
        "lgi_value": moments.lgi_value(c),
        "lgi_satisfied": bool(moments.lgi_value(c) <= 1.0 + 1e-12),
    }
    if args.samples:
        n1, n2, n3 = moments.trine_axes()
        rho = moments.maximally_mixed(2)
        emp = {}
        for stream, (key, (a, b)) in enumerate({"c12": (n1, n2), "c23": (n2, n3), "c13": (n1, n3)}.items()):
            run = sampling.sample_table(moments.sequential_pair_table(rho, a, b, eta), args.samples, args.seed, stream)
            emp[key] = sampling.empirical_correlation(run)
        results["empirical"] = emp
    inputs = {"eta": eta, "samples": args.samples}
    return Report("moments", inputs, results, {"seed": args.seed if args.samples else None}), EXIT_OK


def cmd_compat(args) -> tuple[Report, int]:
    axes = args.axes
    if len(axes) not in (2, 3):
        raise UnsharpError("compat needs 2 or 3 axes")
    problem = compat.problem_for_axes(axes, args.eta)
    rep = compat.solve_feasibility(problem, _solver_cfg(args))
    results = {
        "verdict": rep.verdict.value,
        "residual": rep.residual,
        "iterations": rep.iterations,
        "constraint_rank": rep.rank,
        "witness": _bloch_dict(rep.witness) if rep.witness is not None else None,
    }
    if rep.witness is not None:
        chk = compat.check_witness(problem, rep.witness)
        results["witness_check"] = {
            "ok": chk.ok,
            "marginal_error": chk.marginal_error,
            "effect_violation": chk.effect_violation,
        }
    if len(axes) == 2:
        results["pair_criterion"] = compat.pair_criterion_unbiased(args.eta * axes[0].vec, args.eta * axes[1].vec)
    code = EXIT_INDETERMINATE if rep.verdict is compat.Verdict.INDETERMINATE else EXIT_OK
    inputs = {"axes": [list(a.n) for a in axes], "eta": args.eta}
    return Report("compat", inputs, results), code


def cmd_repro_all(args) -> tuple[Report, int]:
    checks = repro.run_all()
    results = {c.name: c.as_dict() for c in checks}
    failed = [c.name for c in checks if not c.ok]
    results["all_ok"] = not failed
    results["failed"] = failed
    return Report("repro-all", {}, results), (EXIT_TOLERANCE if failed else EXIT_OK)


def _add_solver_flags(p):
    d = compat.SolverConfig()
    p.add_argument("--max-iter", type=int, default=d.max_iter, help=f"Dykstra iteration cap (default {d.max_iter})")
    p.add_argument("--tol-feas", type=float, default=d.tol_feas, help=f"feasible residual (default {d.tol_feas})")
    p.add_argument("--tol-infeas", type=float, default=d.tol_infeas, help=f"infeasible gap floor (default {d.tol_infeas})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unsharp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", parents=[common], help="bisect joint-measurability thresholds")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--set", choices=sorted(repro.THRESHOLD_SETS))
    group.add_argument("--axes", type=_axes_arg, help="'x,y,z;x,y,z[;x,y,z]'")
    p.add_argument("--mode", choices=("full", "pairwise"), default="full", help="with --axes")
    p.add_argument("--gap", type=float, default=1e-3, help="bisection bracket width (default 1e-3)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("game", parents=[common], help="entropic uncertainty game with quantum memory")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--eta", type=_unit_interval)
    group.add_argument("--sweep", type=_sweep, help="a:b:step")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("moments", parents=[common], help="trine moment matrix and Leggett-Garg value")
    p.add_argument("--eta", type=_unit_interval, required=True)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("compat", parents=[common], help="decide joint measurability of noisy spins")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.add_argument("--eta", type=_unit_interval, required=True)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("repro-all", parents=[common], help="regenerate and check every headline number")
    p.set_defaults(func=cmd_repro_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 0) < 0:
        parser.error("--samples must be >= 0")
    try:
        report, code = args.func(args)
    except UnsharpError as exc:
        print(f"unsharp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
