"""Command-line front end: run single solves or benchmark suites from YAML
configs, emitting trace CSVs, summary JSON, aligned tables, and SVG plots.

Config schemas (strict: unknown keys are rejected by name) are documented
in the README; the trace CSV schema is fixed:
``k,residual,step_type,ls_depth,eta,sigma_min_G,wall_ms`` with one row per
iteration plus a terminal row, residuals carrying 17 significant digits.
By default the wall_ms column is written as 0 so that re-running an
identical config reproduces the file byte-for-byte; set ``timing: true``
to record real per-iteration times (at the cost of reproducibility).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from .bregman import KERNELS, solve_bregman
from .core import (
    CONVERGED,
    MAX_ITERS,
    ConfigurationError,
    DegenerateInstance,
    FeasibilityError,
    IterateTrace,
    SolverConfig,
)
from .problems import FAMILIES, generate
from .solver import solve_aphl, solve_apm, solve_plain
from .svgplot import residual_curve_svg

METHODS = ("aphl", "apm", "bregman", "plain_ap")

_SOLVER_KEYS = ("kappa", "eta_max", "alpha", "max_linesearch", "tau_rule",
                "tol", "max_iters", "proj_tol_scale", "track_sigma_min")

_RUN_KEYS = ("problem", "method", "seed", "kernel", "solver", "output_dir",
             "plot", "timing")
_BENCH_KEYS = ("suite", "solver", "output_dir", "workers", "timing")
_CELL_KEYS = ("family", "dims", "seeds", "methods", "kernel")


def _reject_unknown(mapping: dict, allowed, where: str):
    if not isinstance(mapping, dict):
        raise ConfigurationError(f"section {where!r} must be a mapping")
    for key in mapping:
        if key not in allowed:
            raise ConfigurationError(f"unknown key {where + '.' + str(key)!r}")


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigurationError("config root must be a mapping")
    return cfg


def make_solver_config(overrides) -> SolverConfig:
    overrides = overrides or {}
    _reject_unknown(overrides, _SOLVER_KEYS, "solver")
    return SolverConfig(**overrides)


def _validate_problem(section) -> tuple:
    _reject_unknown(section, ("family", "dims"), "problem")
    family = section.get("family")
    if family not in FAMILIES:
        raise ConfigurationError(
            f"unknown problem family {family!r}; known: "
            f"{', '.join(sorted(FAMILIES))}")
    dims = section.get("dims", {}) or {}
    if not isinstance(dims, dict):
        raise ConfigurationError("problem.dims must be a mapping")
    return family, dims


def _interior_start(x0, xset):
    """Clamp a set-boundary start strictly inside, for the interior-only method."""
    margin = 1e-3 * (1.0 + float(np.max(np.abs(x0))))
    kind = getattr(xset, "kind", "")
    if kind == "Orthant":
        return np.maximum(x0, margin)
    if kind == "Box":
        return np.clip(x0, xset.l + margin, xset.u - margin)
    raise ConfigurationError(
        f"method 'bregman' supports Orthant/Box problems, not {kind!r}")


def run_single(family: str, dims: dict, seed: int, method: str,
               solver_cfg: SolverConfig, kernel_name: str = "entropy"):
    """Generate the instance and run one method; returns (trace, wall_s, meta)."""
    inst = generate(family, dims, seed)
    t0 = time.perf_counter()
    if method == "aphl":
        _, trace = solve_aphl(inst.cs, inst.xset, inst.x0, solver_cfg)
    elif method == "plain_ap":
        _, trace = solve_plain(inst.cs, inst.xset, inst.x0, solver_cfg)
    elif method == "apm":
        _, trace = solve_apm(inst.cs, inst.xset, inst.x0, solver_cfg,
                             proj_m=inst.affine_projector)
    elif method == "bregman":
        if kernel_name not in KERNELS:
            raise ConfigurationError(
                f"unknown kernel {kernel_name!r}; known: "
                f"{', '.join(sorted(KERNELS))}")
        kern = KERNELS[kernel_name](inst.cs.n)
        x0 = _interior_start(inst.x0, inst.xset)
        _, trace = solve_bregman(inst.cs, kern, x0, solver_cfg)
    else:
        raise ConfigurationError(
            f"unknown method {method!r}; known: {', '.join(METHODS)}")
    return trace, time.perf_counter() - t0, inst.meta


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_trace_csv(path: Path, trace: IterateTrace, timing: bool = False):
    lines = ["k,residual,step_type,ls_depth,eta,sigma_min_G,wall_ms"]
    for rec in trace.records:
        wall = f"{rec.wall_ms:.3f}" if timing else "0"
        lines.append(",".join([
            str(rec.k),
            f"{rec.residual:.17g}",
            rec.step_type or "",
            _fmt(rec.ls_depth),
            _fmt(rec.eta),
            _fmt(rec.sigma_min_G),
            wall,
        ]))
    path.write_text("\n".join(lines) + "\n")


def _slug(family, method, seed) -> str:
    return f"{family}_{method}_seed{seed}"


def cmd_run(cfg: dict, out_override=None, seed_override=None,
            plot_override: bool = False) -> int:
    _reject_unknown(cfg, _RUN_KEYS, "config")
    family, dims = _validate_problem(cfg.get("problem", {}))
    method = cfg.get("method", "aphl")
    if method not in METHODS:
        raise ConfigurationError(
            f"unknown method {method!r}; known: {', '.join(METHODS)}")
    seed = int(seed_override if seed_override is not None
               else cfg.get("seed", 0))
    solver_cfg = make_solver_config(cfg.get("solver"))
    kernel_name = cfg.get("kernel", "entropy")
    timing = bool(cfg.get("timing", False))
    plot = bool(cfg.get("plot", False)) or plot_override
    outdir = Path(out_override or cfg.get("output_dir", "out"))
    outdir.mkdir(parents=True, exist_ok=True)

    try:
        trace, wall_s, meta = run_single(family, dims, seed, method,
                                         solver_cfg, kernel_name)
    except DegenerateInstance as exc:
        raise ConfigurationError(str(exc)) from exc
    except ConfigurationError:
        raise
    except FeasibilityError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3

    slug = _slug(family, method, seed)
    trace_path = outdir / f"trace_{slug}.csv"
    write_trace_csv(trace_path, trace, timing)
    plot_path = None
    if plot:
        plot_path = outdir / f"plot_{slug}.svg"
        plot_path.write_text(residual_curve_svg(
            trace.residuals, title=f"{family} / {method} / seed {seed}"))
    summary = {
        "family": family,
        "dims": dims,
        "seed": seed,
        "method": method,
        "status": trace.status,
        "iterations": trace.iterations,
        "final_feas": trace.final_residual,
        "wall_time_s": wall_s,
        "solver": {k: getattr(solver_cfg, k) for k in _SOLVER_KEYS},
        "instance": meta,
        "trace_csv": str(trace_path),
        "plot_svg": str(plot_path) if plot_path else None,
    }
    if method == "bregman":
        summary["kernel"] = kernel_name
        summary["interior_start"] = True
    (outdir / f"summary_{slug}.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"{slug}: {trace.status} after {trace.iterations} iterations, "
          f"final feas {trace.final_residual:.3e} ({wall_s:.3f}s)")
    if trace.status == CONVERGED:
        return 0
    if trace.status == MAX_ITERS:
        return 2
    return 3


def _bench_one(task):
    family, dims, seed, method, solver_over, kernel_name = task
    solver_cfg = make_solver_config(solver_over)
    row = {"family": family, "dims": dims, "seed": seed, "method": method}
    try:
        trace, wall_s, _ = run_single(family, dims, seed, method,
                                      solver_cfg, kernel_name)
        row.update(status=trace.status, iterations=trace.iterations,
                   final_feas=trace.final_residual, wall_time_s=wall_s)
        row["trace"] = trace
    except FeasibilityError as exc:
        row.update(status=f"error: {exc}", iterations=None, final_feas=None,
                   wall_time_s=None, trace=None)
    return row


def _dims_label(family, dims):
    if not dims:
        return family
    inner = " ".join(f"{k}={dims[k]:g}" if isinstance(dims[k], float)
                     else f"{k}={dims[k]}" for k in dims)
    return f"{family} {inner}"


def cmd_bench(cfg: dict, out_override=None, plot_override: bool = False) -> int:
    _reject_unknown(cfg, _BENCH_KEYS, "config")
    suite = cfg.get("suite")
    if not suite:
        print("bench suite is empty", file=sys.stderr)
        return 1
    if not isinstance(suite, list):
        raise ConfigurationError("suite must be a list of cells")
    solver_over = cfg.get("solver")
    make_solver_config(solver_over)  # validate once up front
    timing = bool(cfg.get("timing", False))
    workers = int(cfg.get("workers", 1))
    outdir = Path(out_override or cfg.get("output_dir", "out"))
    (outdir / "traces").mkdir(parents=True, exist_ok=True)

    tasks = []
    for idx, cell in enumerate(suite):
        _reject_unknown(cell, _CELL_KEYS, f"suite[{idx}]")
        family, dims = _validate_problem(
            {"family": cell.get("family"), "dims": cell.get("dims", {})})
        seeds = cell.get("seeds", [0])
        methods = cell.get("methods", ["aphl"])
        kernel_name = cell.get("kernel", "entropy")
        for method in methods:
            if method not in METHODS:
                raise ConfigurationError(
                    f"unknown method {method!r} in suite[{idx}]")
            for seed in seeds:
                tasks.append((family, dims, int(seed), method, solver_over,
                              kernel_name))

    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]

    plot = plot_override
    csv_lines = ["family,dims,seed,method,status,iterations,final_feas,"
                 "wall_time_s"]
    for row in rows:
        if row["trace"] is not None:
            slug = _slug(row["family"], row["method"], row["seed"])
            write_trace_csv(outdir / "traces" / f"trace_{slug}.csv",
                            row["trace"], timing)
            if plot:
                (outdir / "traces" / f"plot_{slug}.svg").write_text(
                    residual_curve_svg(row["trace"].residuals, title=slug))
        dims_str = ";".join(f"{k}={v}" for k, v in row["dims"].items())
        csv_lines.append(",".join([
            row["family"], dims_str, str(row["seed"]), row["method"],
            str(row["status"]), _fmt(row["iterations"]),
            _fmt(row["final_feas"]),
            "" if row["wall_time_s"] is None else f"{row['wall_time_s']:.3f}",
        ]))
    (outdir / "bench_results.csv").write_text("\n".join(csv_lines) + "\n")

    # aligned table of per-cell medians, mirroring iter / feas / time columns
    cells = {}
    for row in rows:
        key = (_dims_label(row["family"], row["dims"]), row["method"])
        cells.setdefault(key, []).append(row)
    header = f"{'instance':<44}{'method':<10}{'iter':>8}{'feas':>12}{'time_s':>10}"
    table = [header, "-" * len(header)]
    all_cells_ok = True
    for (label, method), cell_rows in cells.items():
        good = [r for r in cell_rows if r["trace"] is not None
                and r["status"] == CONVERGED]
        if good:
            iters = statistics.median(r["iterations"] for r in good)
            feas = statistics.median(r["final_feas"] for r in good)
            wall = statistics.median(r["wall_time_s"] for r in good)
            table.append(f"{label:<44}{method:<10}{iters:>8.0f}"
                         f"{feas:>12.2e}{wall:>10.2f}")
        else:
            all_cells_ok = False
            table.append(f"{label:<44}{method:<10}{'-':>8}{'-':>12}{'-':>10}")
        failures = [r for r in cell_rows if r["trace"] is None
                    or r["status"] != CONVERGED]
        for r in failures:
            table.append(f"    seed {r['seed']}: {r['status']}")
    text = "\n".join(table) + "\n"
    (outdir / "bench_table.txt").write_text(text)
    print(text, end="")
    return 0 if all_cells_ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="apfeas",
        description="Feasibility-solver benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one solve from a YAML config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--seed", type=int, default=None, help="seed override")
    p_run.add_argument("--plot", action="store_true",
                       help="emit an SVG residual plot")
    p_bench = sub.add_parser("bench", help="run a benchmark suite")
    p_bench.add_argument("config")
    p_bench.add_argument("--out", default=None)
    p_bench.add_argument("--plot", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.command == "run":
            return cmd_run(cfg, out_override=args.out,
                           seed_override=args.seed,
                           plot_override=args.plot)
        return cmd_bench(cfg, out_override=args.out,
                         plot_override=args.plot)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
