"""Command-line entry point: dispatch experiments, write CSV/JSON/PNG reports.

Every experiment writes three artifacts into the output directory:

    <id>_series.csv    delimited time series (17 significant digits)
    <id>_report.json   all report fields plus the effective configuration
    <id>_series.png    log-log figure of the series with fitted slopes

Writes are atomic (write to a temp file, then rename).  Exit status: 0 when
every verdict is PASS (or not applicable), 1 when any experiment FAILs,
2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import tempfile
import time
from typing import Optional

import numpy as np

from . import harness, semigroup
from .config import RunConfig, apply_overrides, load_config
from .errors import ShlabError
from .exponents import ProblemParams, compute_exponents, p_joseph_lundgren
from .harness import InitialDataSpec, Report, default_grid
from .nonlinear import build_field
from .steady_states import (
    below_v_infinity,
    crossings_with_v_infinity,
    integrate_psi1,
    psi_k,
    v_infinity,
)

_DATA_KINDS = {"power-tail": "power_tail", "sigma-tail": "sigma_tail",
               "annulus": "annulus", "psi-k": "psi_k_gap", "l2-tail": "l2_tail"}


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and (math.isinf(obj) or math.isnan(obj)):
        return repr(obj)
    return obj


def write_report(report: Report, cfg: RunConfig, out_dir: str, figures: bool = True) -> None:
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, report.experiment)
    if report.series is not None and len(report.series):
        lines = [",".join(report.series_columns)]
        for row in np.asarray(report.series, dtype=float):
            lines.append(",".join(f"{x:.17g}" for x in row))
        _atomic_write(base + "_series.csv", "\n".join(lines) + "\n")
        report.series_files = [os.path.basename(base) + "_series.csv"]
    body = _sanitize(report.as_dict())
    body["effective_config"] = _sanitize(cfg.as_dict())
    payload = {
        "report": body,
        "meta": {"created_at": time.strftime("%Y-%m-%dT%H:%M:%S%z")},
    }
    _atomic_write(base + "_report.json", json.dumps(payload, sort_keys=True, indent=2,
                                                    default=_json_default) + "\n")
    if figures and report.series is not None and len(report.series):
        from .figures import render_series_figure

        render_series_figure(report, base + "_series.png")


# ---------------------------------------------------------------------------
# experiment runners (top level so a process pool can pickle them)


def _grid(cfg: RunConfig):
    return default_grid(cfg.s_min, cfg.s_max, cfg.points)


def run_exponents(cfg: RunConfig) -> list[Report]:
    exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
    rep = Report("exponents", {"n": cfg.n, "p": cfg.p}, None, None, None, "PASS",
                 measurements=exps.as_dict())
    return [rep]


def run_steady_state(cfg: RunConfig) -> list[Report]:
    params = ProblemParams(cfg.n, cfg.p)
    r_max = cfg.extras.get("r_max", 50.0)
    k = cfg.k
    profile = integrate_psi1(params, r_max=r_max * max(1.0, k ** ((cfg.p - 1) / 2.0)))
    radii = np.geomspace(1e-3, r_max, 512)
    vals = psi_k(profile, k, radii, params)
    series = np.column_stack([radii, vals])
    below = below_v_infinity(profile, params)
    crossings = crossings_with_v_infinity(profile, params)
    decreasing = bool(np.all(np.diff(profile.values) < 0.0))
    expect_below = cfg.p >= p_joseph_lundgren(cfg.n)
    ok = decreasing and (below if expect_below else len(crossings) > 0)
    rep = Report(
        "steady_state", {"n": cfg.n, "p": cfg.p, "k": k, "r_max": r_max},
        None, None, None, "PASS" if ok else "FAIL",
        ["r", "psi_k"], series,
        measurements={
            "strictly_decreasing": decreasing,
            "below_v_infinity": below,
            "crossings": crossings,
            "v_infinity_at_1": v_infinity(1.0, params),
        },
    )
    return [rep]


def run_linear_decay(cfg: RunConfig) -> list[Report]:
    exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
    kind = cfg.kind or "power_tail"
    b = cfg.b if cfg.b is not None else 0.1
    window = (10.0, cfg.t1)
    times = harness.snapshot_times(window)
    grid = _grid(cfg)
    if kind == "power_tail":
        ell = cfg.ell if cfg.ell is not None else 5.0
        if not (exps.m < ell < cfg.n - exps.sigma):
            raise ShlabError(f"ell={ell} outside (2/(p-1), n-sigma)")
        spec = InitialDataSpec.power_tail(b, ell)
        w0 = build_field(spec, exps, grid)
        series = semigroup.decay_series_linear(w0, exps, times)
        theory = -ell / 2.0
        fit = harness.fit_rate(series, window)
        tol = harness.LINEAR_SLOPE_RTOL * abs(theory)
        rep = Report("linear_decay", {"n": cfg.n, "p": cfg.p, "ell": ell, "b": b},
                     theory, fit, tol, harness.slope_verdict(fit, theory, tol),
                     ["t", "sup_weighted"], series)
        return [rep]
    if kind == "sigma_tail":
        spec = InitialDataSpec.sigma_tail(b)
        w0 = build_field(spec, exps, grid)
        series = semigroup.vanishing_series_linear(w0, exps, times)
        ratio = float(series[-1, 1] / series[0, 1])
        ok = harness.is_nonincreasing(series[:, 1]) and ratio <= 0.2
        rep = Report("linear_vanishing", {"n": cfg.n, "p": cfg.p, "b": b},
                     None, None, 0.2, "PASS" if ok else "FAIL",
                     ["t", "scaled_sup_weighted"], series,
                     measurements={"final_over_initial": ratio})
        return [rep]
    raise ShlabError(f"linear-decay supports power-tail or sigma-tail data, got {kind}")


def run_nonlinear_decay(cfg: RunConfig) -> list[Report]:
    kind = cfg.kind or "power_tail"
    b = cfg.b if cfg.b is not None else 0.1
    grid = _grid(cfg)
    window = (10.0, cfg.t1)
    if kind == "power_tail":
        exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
        ell = cfg.ell if cfg.ell is not None else 5.0
        if not (exps.sigma < ell < cfg.n - exps.sigma):
            raise ShlabError(
                f"ell={ell} outside the admissible window ({exps.sigma:.4g}, {cfg.n - exps.sigma:.4g})"
            )
        rep_in, rep_out = harness.run_theorem_half_l(cfg.n, cfg.p, ell, b, grid=grid, window=window)
        return [rep_in, rep_out]
    if kind == "sigma_tail":
        return [harness.run_theorem_mth2(cfg.n, cfg.p, b, grid=grid, window=window)]
    if kind == "annulus":
        spec = InitialDataSpec.annulus(b, cfg.extras.get("r_lo", 1.0), cfg.extras.get("r_hi", 2.0))
        return [harness.run_l2_stability(cfg.n, cfg.p, spec, grid=grid, window=window)]
    if kind == "psi_k_gap":
        return [harness.run_psik_stability(cfg.n, cfg.p, cfg.k, grid=grid, window=window)]
    raise ShlabError(f"unknown data kind {kind!r}")


def run_supnorm_growth(cfg: RunConfig) -> list[Report]:
    exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
    ell = cfg.ell if cfg.ell is not None else 5.0
    b = cfg.b if cfg.b is not None else 1e-2 * exps.L
    t1 = cfg.t1 if cfg.t1 != 1e4 else 1e6
    window = (1e2, t1)
    grid = default_grid(cfg.s_min, max(cfg.s_max, math.log(1e5)),
                        max(cfg.points, 2304))
    sigma_case = abs(ell - exps.sigma) <= 1e-12
    rep = harness.run_corollary_small_b(
        cfg.n, cfg.p, None if sigma_case else ell, b, grid=grid, window=window
    )
    return [rep]


def run_l2_stability_cmd(cfg: RunConfig) -> list[Report]:
    kind = cfg.kind or "annulus"
    b = cfg.b if cfg.b is not None else 0.1
    if kind == "annulus":
        spec = InitialDataSpec.annulus(b, cfg.extras.get("r_lo", 1.0), cfg.extras.get("r_hi", 2.0))
    elif kind == "l2_tail":
        spec = InitialDataSpec.l2_tail(b, cfg.extras.get("r_hi", 100.0))
    else:
        raise ShlabError(f"l2-stability supports annulus or l2-tail data, got {kind}")
    return [harness.run_l2_stability(cfg.n, cfg.p, spec, grid=_grid(cfg), window=(10.0, cfg.t1))]


def run_psik_stability_cmd(cfg: RunConfig) -> list[Report]:
    return [harness.run_psik_stability(cfg.n, cfg.p, cfg.k, grid=_grid(cfg), window=(10.0, cfg.t1))]


def run_kernel_check(cfg: RunConfig) -> list[Report]:
    exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
    rho = cfg.extras.get("rho", 0.1)
    times = [0.1, 1.0, 10.0, 100.0]
    result = semigroup.kernel_check_sweep(rho, times, cfg.n, exps.sigma, _grid(cfg))
    slopes_ok = bool(np.all(np.abs(result["origin_slopes"] + exps.sigma) <= 0.05 * exps.sigma))
    ok = result["best_variation"] <= 3.0 and slopes_ok
    series = np.column_stack([result["times"], result["ratios"].T])
    rep = Report(
        "kernel_check", {"n": cfg.n, "p": cfg.p, "rho": rho},
        None, None, 3.0, "PASS" if ok else "FAIL",
        ["t"] + [f"ratio_c{c:g}" for c in result["c_values"]], series,
        measurements={
            "best_c": result["best_c"],
            "best_variation": result["best_variation"],
            "origin_slopes": result["origin_slopes"],
            "expected_origin_slope": -exps.sigma,
        },
    )
    return [rep]


def run_smoothing_check(cfg: RunConfig) -> list[Report]:
    exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
    q = cfg.extras.get("q", 2.0)
    r = cfg.extras.get("r", 1.0)
    b = cfg.b if cfg.b is not None else 0.1
    grid = _grid(cfg)
    spec = InitialDataSpec.annulus(b, cfg.extras.get("r_lo", 0.25), cfg.extras.get("r_hi", 0.5))
    w0 = build_field(spec, exps, grid)
    times = [1.0, 10.0, 100.0, 1000.0]
    ratios = [semigroup.smoothing_ratio(w0.copy(), t, q, r, exps) for t in times]
    vals = np.array([x for x in ratios if x is not None])
    variation = float(np.max(vals) / np.min(vals))
    ok = variation <= 3.0
    series = np.column_stack([times, vals])
    rep = Report(
        "smoothing_check", {"n": cfg.n, "p": cfg.p, "q": q, "r": r, "b": b},
        None, None, 3.0, "PASS" if ok else "FAIL",
        ["t", "smoothing_constant"], series,
        measurements={"variation": variation},
    )
    return [rep]


_RUNNERS = {
    "exponents": run_exponents,
    "steady-state": run_steady_state,
    "linear-decay": run_linear_decay,
    "nonlinear-decay": run_nonlinear_decay,
    "supnorm-growth": run_supnorm_growth,
    "l2-stability": run_l2_stability_cmd,
    "psik-stability": run_psik_stability_cmd,
    "kernel-check": run_kernel_check,
    "smoothing-check": run_smoothing_check,
}

#: subcommands executed by `all`, with per-experiment config adjustments
_ALL_SUITE = [
    ("exponents", {}),
    ("steady-state", {}),
    ("linear-decay", {"kind": "power_tail"}),
    ("nonlinear-decay", {"kind": "power_tail"}),
    ("nonlinear-decay", {"kind": "sigma_tail"}),
    ("supnorm-growth", {}),
    ("l2-stability", {"kind": "annulus"}),
    ("psik-stability", {}),
    ("kernel-check", {}),
    ("smoothing-check", {}),
]


def _run_one(name: str, cfg: RunConfig, out_dir: str, figures: bool) -> list[dict]:
    reports = _RUNNERS[name](cfg)
    for rep in reports:
        write_report(rep, cfg, out_dir, figures)
    return [{"experiment": r.experiment, "verdict": r.verdict} for r in reports]


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shlab",
        description="Numerical experiments for the supercritical semilinear heat equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="INI config file")
        sp.add_argument("--output-dir", default=None,
                        help="report directory (default: $SHL_OUTPUT_DIR or '.')")
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--s-min", dest="s_min", type=float, default=None)
        sp.add_argument("--s-max", dest="s_max", type=float, default=None)
        sp.add_argument("--points", type=int, default=None)
        sp.add_argument("--t0", type=float, default=None)
        sp.add_argument("--t1", type=float, default=None)
        sp.add_argument("--dt0", type=float, default=None)
        sp.add_argument("--growth", type=float, default=None)
        sp.add_argument("--theta", type=float, default=None)
        sp.add_argument("--no-figures", action="store_true")
        return sp

    common(sub.add_parser("exponents", help="print the exponent algebra as JSON"))
    sp = common(sub.add_parser("steady-state", help="integrate psi_k and compare with v_inf"))
    sp.add_argument("--k", type=float, default=None)
    sp.add_argument("--r-max", dest="r_max", type=float, default=None)

    sp = common(sub.add_parser("linear-decay", help="weighted decay of the linear flow"))
    sp.add_argument("--data", choices=["power-tail", "sigma-tail"], default=None)
    sp.add_argument("--ell", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)

    sp = common(sub.add_parser("nonlinear-decay", help="decay rates of the nonlinear gap flow"))
    sp.add_argument("--data", choices=["power-tail", "sigma-tail", "annulus", "psi-k"], default=None)
    sp.add_argument("--ell", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--k", type=float, default=None)

    sp = common(sub.add_parser("supnorm-growth", help="lower-bound growth of ||u||_inf"))
    sp.add_argument("--ell", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)

    sp = common(sub.add_parser("l2-stability", help="L^2 convergence to v_inf"))
    sp.add_argument("--data", choices=["annulus", "l2-tail"], default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--r-lo", dest="r_lo", type=float, default=None)
    sp.add_argument("--r-hi", dest="r_hi", type=float, default=None)

    sp = common(sub.add_parser("psik-stability", help="L^2 stability of psi_k"))
    sp.add_argument("--k", type=float, default=None)

    sp = common(sub.add_parser("kernel-check", help="kernel upper bound against the weighted Gaussian"))
    sp.add_argument("--rho", type=float, default=None)

    sp = common(sub.add_parser("smoothing-check", help="L^r -> L^q smoothing constant sweep"))
    sp.add_argument("--q", type=float, default=None)
    sp.add_argument("--r", type=float, default=None)

    sp = common(sub.add_parser("all", help="run the full acceptance suite"))
    sp.add_argument("--jobs", type=int, default=1, help="worker pool width")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {
        key: getattr(args, key, None)
        for key in ("n", "p", "s_min", "s_max", "points", "t0", "t1", "dt0", "growth", "theta", "k", "b", "ell")
    }
    data = getattr(args, "data", None)
    if data is not None:
        overrides["kind"] = _DATA_KINDS[data]
    cfg = apply_overrides(cfg, overrides)
    extras = dict(cfg.extras)
    for key in ("r_max", "r_lo", "r_hi", "rho", "q", "r"):
        val = getattr(args, key, None)
        if val is not None:
            extras[key] = val
    if extras != cfg.extras:
        from dataclasses import replace

        cfg = replace(cfg, extras=extras)
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    out_dir = args.output_dir or os.environ.get("SHL_OUTPUT_DIR", ".")
    figures = not args.no_figures
    try:
        cfg = _config_from_args(args)
        if args.command == "exponents":
            exps = compute_exponents(ProblemParams(cfg.n, cfg.p))
            print(json.dumps(_sanitize(exps.as_dict()), sort_keys=True, indent=2,
                             default=_json_default))
            return 0
        if args.command == "all":
            jobs = max(1, args.jobs)
            results: list[dict] = []
            if jobs == 1:
                for name, tweaks in _ALL_SUITE:
                    run_cfg = apply_overrides(cfg, tweaks)
                    results.extend(_run_one(name, run_cfg, out_dir, figures))
            else:
                with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
                    futures = [
                        pool.submit(_run_one, name, apply_overrides(cfg, tweaks), out_dir, figures)
                        for name, tweaks in _ALL_SUITE
                    ]
                    for fut in futures:
                        results.extend(fut.result())
            failed = [r for r in results if r["verdict"] == "FAIL"]
            for r in results:
                print(f"{r['experiment']}: {r['verdict']}")
            return 1 if failed else 0

        summaries = _run_one(args.command, cfg, out_dir, figures)
        for r in summaries:
            print(f"{r['experiment']}: {r['verdict']}")
        return 1 if any(r["verdict"] == "FAIL" for r in summaries) else 0
    except ShlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
