"""Command-line front end.

Machine-readable results go to stdout (or ``--output``), a short human
summary to stderr.  Exit codes: 0 ok, 2 usage/config error, 3 domain or
infeasibility error, 4 numeric non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import calibration, continuous, discrete, sweep
from .errors import DomainError, NumericError
from .metrics import (
    DEFAULT_BITS,
    DEFAULT_DELTA,
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    BerModel,
    DeviceParams,
    RefreshPlan,
    mse_for_psnr,
    psnr,
    word_mse,
)

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

DEFAULTS = {
    "alpha": DEFAULT_ALPHA,
    "beta": DEFAULT_BETA,
    "bits": DEFAULT_BITS,
    "delta": DEFAULT_DELTA,
    "format": "json",
}
CONFIG_KEYS = {
    "alpha", "beta", "bits", "delta", "budget", "target_mse", "target_psnr", "gamma",
    "z_cap", "budgets", "measurements", "report", "output", "format",
}  # fmt: skip


class UsageError(Exception):
    pass


def _float_list(xs):
    return [float(v) for v in xs]


def _num(x):
    """JSON-safe float: infinities become strings."""
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with the same keys as the flags")
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--bits", type=int)
    common.add_argument("--delta", type=float)
    common.add_argument("--output", help="write machine-readable output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))

    p = argparse.ArgumentParser(prog="refreshalloc", description="Per-bit refresh interval allocation")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="continuous optimum for a power budget")
    s.add_argument("--budget", type=float)

    s = sub.add_parser("solve-discrete", parents=[common], help="integer multiples of gamma*delta")
    s.add_argument("--budget", type=float)
    s.add_argument("--gamma", type=int, action="append")
    s.add_argument("--z-cap", dest="z_cap", type=int)

    s = sub.add_parser("fit", parents=[common], help="fit alpha, beta from a measurement CSV")
    s.add_argument("--measurements")

    s = sub.add_parser("sweep", parents=[common], help="uniform vs optimal (vs discrete) over budgets")
    s.add_argument("--budgets", help="file with one budget per line, or min:max:count (log-spaced)")
    s.add_argument("--gamma", type=int, action="append")
    s.add_argument("--z-cap", dest="z_cap", type=int)

    s = sub.add_parser("savings", parents=[common], help="power saved by the optimal plan at a fidelity")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--target-mse", dest="target_mse", type=float)
    g.add_argument("--target-psnr", dest="target_psnr", type=float)

    s = sub.add_parser("verify", parents=[common], help="KKT residuals of a solve JSON report")
    s.add_argument("--report")
    s.add_argument("--budget", type=float)
    return p


def _merge(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("--config: top level must be a JSON object")
        unknown = set(loaded) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"--config: unknown keys {sorted(unknown)}")
        cfg.update(loaded)
        explicit = set(loaded)
    else:
        explicit = set()
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command"):
            cfg[k] = v
            explicit.add(k)
    cfg["_explicit"] = explicit
    return cfg


def _require(cfg, key, flag):
    if cfg.get(key) is None:
        raise UsageError(f"missing required flag {flag}")
    return cfg[key]


def _model_params(cfg, gamma=1):
    try:
        model = BerModel(float(cfg["alpha"]), float(cfg["beta"]))
        params = DeviceParams(int(cfg["bits"]), float(cfg["delta"]), int(gamma))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"malformed model parameters: {exc}") from exc
    return model, params


def _parse_budgets(spec):
    if isinstance(spec, list):
        return _float_list(spec)
    spec = str(spec)
    path = Path(spec)
    if path.is_file():
        vals = []
        for line in path.read_text().splitlines():
            line = line.split("#")[0].strip()
            if line:
                vals.append(float(line.split(",")[0]))
        return vals
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"--budgets: expected a file or min:max:count, got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--budgets: {exc}") from exc
    if not (0 < lo <= hi) or n < 1:
        raise UsageError(f"--budgets: need 0 < min <= max and count >= 1, got {spec!r}")
    return np.geomspace(lo, hi, n).tolist()


def _gammas(cfg, default=(1,)):
    g = cfg.get("gamma")
    if g is None:
        return list(default)
    return [int(v) for v in (g if isinstance(g, list) else [g])]


def _kkt_dict(k: continuous.KktReport):
    return {
        "max_residual": k.max_residual,
        "stationarity_residuals": _float_list(k.stationarity_residuals),
        "lambda": _float_list(k.lam),
        "complementary_slackness_power": k.complementary_slackness_power,
        "complementary_slackness_bounds": _float_list(k.complementary_slackness_bounds),
        "primal_violation": k.primal_violation,
        "dual_violation": k.dual_violation,
    }


def _params_echo(model, params, **extra):
    d = {"alpha": model.alpha, "beta": model.beta, "bits": params.bits, "delta": params.delta}
    d.update(extra)
    return d


def solve_report_dict(model, params, rep: continuous.SolveReport) -> dict:
    return {
        "plan": {"intervals": _float_list(rep.intervals)},
        "nu": rep.nu,
        "power": rep.power,
        "mse": rep.mse,
        "psnr_db": _num(rep.psnr_db),
        "kkt": _kkt_dict(rep.kkt),
        "meta": {
            "solver": "closed-form-lambert-w",
            "iterations": rep.bisection_iterations,
            "note": rep.note,
            "parameters": _params_echo(model, params, budget=rep.budget),
        },
    }


def _cmd_solve(cfg):
    model, params = _model_params(cfg)
    budget = float(_require(cfg, "budget", "--budget"))
    rep = continuous.solve(model, params, budget)
    summary = f"budget {budget:g}: power {rep.power:.6g}, MSE {rep.mse:.6g}, PSNR {rep.psnr_db:.3f} dB, nu {rep.nu:.6g}"
    if cfg["format"] == "csv":
        lines = ["bit,interval_s"] + [f"{b},{format(t, '.17g')}" for b, t in enumerate(rep.intervals)]
        return "\n".join(lines) + "\n", summary
    return solve_report_dict(model, params, rep), summary


def _cmd_solve_discrete(cfg):
    gammas = _gammas(cfg)
    if len(gammas) != 1:
        raise UsageError("solve-discrete takes exactly one --gamma")
    model, params = _model_params(cfg, gammas[0])
    budget = float(_require(cfg, "budget", "--budget"))
    z_cap = cfg.get("z_cap")
    rep = discrete.solve_discrete(model, params, budget, None if z_cap is None else int(z_cap))
    summary = (
        f"budget {budget:g}, step {params.step:g}: z={list(rep.plan.z)}, MSE {rep.mse:.6g}, "
        f"{rep.nodes_explored} nodes, proven optimal: {rep.proven_optimal}"
    )
    if cfg["format"] == "csv":
        lines = ["bit,z,interval_s"] + [
            f"{b},{z},{format(t, '.17g')}" for b, (z, t) in enumerate(zip(rep.plan.z, rep.plan.intervals))
        ]
        return "\n".join(lines) + "\n", summary
    out = {
        "plan": {"z": list(rep.plan.z), "step": rep.plan.step, "z_cap": rep.plan.z_cap,
                 "intervals": _float_list(rep.plan.intervals)},
        "power": rep.power,
        "mse": rep.mse,
        "psnr_db": _num(rep.psnr_db),
        "meta": {
            "solver": "branch-and-bound",
            "nodes_explored": rep.nodes_explored,
            "relaxation_gap": _num(rep.relaxation_gap),
            "proven_optimal": rep.proven_optimal,
            "parameters": _params_echo(model, params, budget=budget, gamma=params.gamma),
        },
    }  # fmt: skip
    return out, summary


def _cmd_fit(cfg):
    path = _require(cfg, "measurements", "--measurements")
    try:
        ms = calibration.read_measurements_csv(path)
    except OSError as exc:
        raise UsageError(f"--measurements: {exc}") from exc
    fit = calibration.fit_ber_model(ms)
    summary = f"alpha {fit.model.alpha:.6g}, beta {fit.model.beta:.6g}, r^2 {fit.r_squared:.6f} ({len(ms)} points)"
    out = {
        "alpha": fit.model.alpha,
        "beta": fit.model.beta,
        "r_squared": fit.r_squared,
        "residuals": _float_list(fit.residuals),
        "meta": {"points": len(ms), "source": str(path)},
    }
    return out, summary


def _cmd_sweep(cfg):
    model, params = _model_params(cfg)
    budgets = _parse_budgets(cfg["budgets"]) if cfg.get("budgets") is not None else sweep.default_budget_grid(params)
    gammas = _gammas(cfg, default=())
    z_cap = cfg.get("z_cap")
    rows = sweep.run_sweep(model, params, budgets, gammas, None if z_cap is None else int(z_cap))
    summary = f"{len(rows)} budgets, gammas {gammas or 'none'}"
    if cfg["format"] == "csv":
        return sweep.sweep_to_csv(rows, params.bits, gammas), summary
    out = {
        "rows": [
            {
                "budget": r.budget,
                "power_optimal": r.power_optimal,
                "mse_optimal": r.mse_optimal,
                "psnr_optimal_db": _num(r.psnr_optimal_db),
                "power_uniform": r.power_uniform,
                "mse_uniform": r.mse_uniform,
                "psnr_uniform_db": _num(r.psnr_uniform_db),
                "nu": r.nu,
                "intervals": _float_list(r.intervals),
                "mse_discrete": {str(g): r.mse_discrete[g] for g in gammas},
                "discrete_notes": {str(g): n for g, n in r.discrete_notes.items()},
            }
            for r in rows
        ],
        "meta": {"parameters": _params_echo(model, params, gammas=gammas)},
    }
    return out, summary


def _cmd_savings(cfg):
    model, params = _model_params(cfg)
    if cfg.get("target_mse") is not None and cfg.get("target_psnr") is not None:
        raise UsageError("give only one of --target-mse / --target-psnr")
    if cfg.get("target_psnr") is not None:
        target = mse_for_psnr(float(cfg["target_psnr"]), params.bits)
    else:
        target = float(_require(cfg, "target_mse", "--target-mse or --target-psnr"))
    p_opt = sweep.min_power_for_mse(model, params, target, "optimal")
    p_uni = sweep.min_power_for_mse(model, params, target, "uniform")
    saving = 1.0 - p_opt / p_uni
    out = {
        "target_mse": target,
        "target_psnr_db": _num(psnr(target, params.bits)),
        "power_optimal": p_opt,
        "power_uniform": p_uni,
        "savings": saving,
        "meta": {"parameters": _params_echo(model, params)},
    }
    summary = f"target MSE {target:.6g}: optimal {p_opt:.6g}, uniform {p_uni:.6g}, saving {100 * saving:.1f}%"
    return out, summary


def _cmd_verify(cfg):
    path = _require(cfg, "report", "--report")
    try:
        rep_json = json.loads(Path(path).read_text())
        echo = rep_json.get("meta", {}).get("parameters", {})
        for k in ("alpha", "beta", "bits", "delta"):
            # the report's own parameters win over defaults, explicit flags over both
            if k in echo and k not in cfg["_explicit"]:
                cfg[k] = echo[k]
        if cfg.get("budget") is None:
            cfg["budget"] = echo.get("budget")
        intervals = rep_json["plan"]["intervals"]
        nu = float(rep_json["nu"])
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"--report: cannot read a solve report from {path}: {exc}") from exc
    model, params = _model_params(cfg)
    budget = float(_require(cfg, "budget", "--budget"))
    plan = RefreshPlan(intervals)
    plan.validate(params, rtol=1e-12)
    mse = word_mse(model, plan)
    rep = continuous.SolveReport(
        plan=plan, nu=nu, power=math.fsum(1.0 / plan.intervals), mse=mse,
        psnr_db=psnr(mse, params.bits), bisection_iterations=0, budget=budget,
    )  # fmt: skip
    kkt = continuous.verify_kkt(model, params, budget, rep)
    out = {"kkt": _kkt_dict(kkt), "meta": {"source": str(path), "parameters": _params_echo(model, params, budget=budget)}}
    return out, f"max scaled KKT residual {kkt.max_residual:.3e}"


COMMANDS = {
    "solve": _cmd_solve,
    "solve-discrete": _cmd_solve_discrete,
    "fit": _cmd_fit,
    "sweep": _cmd_sweep,
    "savings": _cmd_savings,
    "verify": _cmd_verify,
}


def _serialize(result, fmt):
    if isinstance(result, str):
        return result
    if fmt == "csv":
        raise UsageError("--format csv is not available for this command")
    return json.dumps(result, indent=2, allow_nan=False) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge(args)
        result, summary = COMMANDS[args.command](cfg)
        text = _serialize(result, cfg["format"])
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    except NumericError as exc:
        print(f"numeric error: {exc}", file=stderr)
        return EXIT_NUMERIC
    if cfg.get("output"):
        Path(cfg["output"]).write_text(text)
    else:
        stdout.write(text)
    print(summary, file=stderr)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
