"""Configuration-driven experiment runner.

A YAML config describes one problem, a regularizer grid, a solver grid and
a list of seeds; run_experiments executes every (solver, regularizer,
seed) cell, writing per-cell trace CSVs, model files and pruning sweeps,
plus a machine-readable summary.  All outputs are deterministic functions
of (config, seeds) except the wall-time trace column.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import baselines, diagnostics, problems, sr2
from .errors import ParseError, UnsupportedMetricError
from .regularizers import L0, L1, L0Ball, Zero, reg_value

__all__ = [
    "ExperimentSpec",
    "parse_config",
    "build_problem",
    "run_experiments",
    "emit_plot_data",
    "rebuild_summary",
    "save_model",
    "load_model",
    "TRACE_SCHEMA",
]

TRACE_SCHEMA = "sr2kit-trace-v1"
TRACE_COLUMNS = (
    "t", "sigma", "rho", "step_norm_sq", "accepted",
    "F_sampled_before", "F_sampled_after", "F_full", "model_decrease",
    "batch_size", "assumption_rejected", "nnz", "wall_time",
)
#: wall-clock columns are excluded from determinism comparisons
NONDETERMINISTIC_COLUMNS = ("wall_time",)

DEFAULT_L1_GRID = (1e-4, 1e-3, 1e-2)

_PROBLEM_KEYS = {
    "kind", "N", "n", "noise_sd", "separation", "support_size", "hidden",
    "task", "data", "format", "gen_seed",
}
_RUN_KEYS = {"seeds", "batch_size", "max_iter", "epochs", "prune_thresholds"}
_SOLVER_NAMES = ("sr2", "proxgen", "proxsgd")


@dataclass
class ExperimentSpec:
    problem: dict
    regularizers: list          # list of Regularizer
    solvers: dict               # name -> override dict
    seeds: list
    batch_size: int
    max_iter: int | None
    epochs: int | None
    prune_thresholds: tuple
    skipped: list = field(default_factory=list)  # (solver, reg) pairs dropped


def _reject_unknown(section, mapping, allowed):
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ParseError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")


def _build_regularizer(entry):
    kind = entry.get("kind")
    if kind == "zero":
        _reject_unknown("regularizers", entry, {"kind"})
        return Zero()
    if kind == "l1":
        _reject_unknown("regularizers", entry, {"kind", "lam"})
        return L1(float(entry["lam"]))
    if kind == "l0":
        _reject_unknown("regularizers", entry, {"kind", "lam"})
        return L0(float(entry["lam"]))
    if kind == "l0ball":
        _reject_unknown("regularizers", entry, {"kind", "k"})
        return L0Ball(int(entry["k"]))
    raise ParseError(f"unknown regularizer kind {kind!r}")


def parse_config(path):
    """Load and validate a YAML experiment config into an ExperimentSpec."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ParseError(f"config root must be a mapping, got {type(raw).__name__}")
    _reject_unknown("<root>", raw, {"problem", "regularizers", "solvers", "run"})

    prob = raw.get("problem")
    if not isinstance(prob, dict) or "kind" not in prob:
        raise ParseError("config needs a [problem] section with a 'kind'")
    _reject_unknown("problem", prob, _PROBLEM_KEYS)

    reg_entries = raw.get("regularizers")
    if reg_entries is None:
        reg_entries = [{"kind": "l1", "lam": lam} for lam in DEFAULT_L1_GRID]
    if not reg_entries:
        raise ParseError("regularizer grid must be nonempty")
    regs = [_build_regularizer(e) for e in reg_entries]

    solver_section = raw.get("solvers") or {"sr2": {}}
    _reject_unknown("solvers", solver_section, _SOLVER_NAMES)
    if not solver_section:
        raise ParseError("solver grid must be nonempty")
    solvers = {}
    for name, overrides in solver_section.items():
        overrides = dict(overrides or {})
        if name == "sr2":
            allowed = {f.name for f in dataclasses.fields(sr2.SolverConfig)}
        else:
            allowed = {f.name for f in dataclasses.fields(baselines.BaselineConfig)}
            allowed.add("alpha")  # may be the string "auto"
        _reject_unknown(f"solvers.{name}", overrides, allowed)
        solvers[name] = overrides

    run_section = raw.get("run") or {}
    _reject_unknown("run", run_section, _RUN_KEYS)
    seeds = list(run_section.get("seeds", [0]))
    if not seeds:
        raise ParseError("run.seeds must be nonempty")
    env_seed = os.environ.get("SR2KIT_SEED")
    if env_seed is not None:
        seeds = [int(env_seed)]
    thresholds = tuple(
        float(t) for t in run_section.get(
            "prune_thresholds", diagnostics.DEFAULT_PRUNE_THRESHOLDS
        )
    )

    # validate SR2 overrides eagerly so config errors surface before any run
    if "sr2" in solvers:
        sr2.SolverConfig(**solvers["sr2"]).validated()

    spec = ExperimentSpec(
        problem=prob,
        regularizers=regs,
        solvers=solvers,
        seeds=seeds,
        batch_size=int(run_section.get("batch_size", 128)),
        max_iter=run_section.get("max_iter"),
        epochs=run_section.get("epochs"),
        prune_thresholds=thresholds,
    )
    # proxsgd cannot run nonconvex regularizers; drop those cells up front
    if "proxsgd" in spec.solvers:
        for reg in regs:
            if not reg.convex:
                spec.skipped.append(("proxsgd", str(reg)))
    return spec


def build_problem(spec):
    """Instantiate the problem described by spec.problem (seeded by
    gen_seed, independent of the solver seeds)."""
    prob = spec.problem
    kind = prob["kind"]
    rng = np.random.default_rng(int(prob.get("gen_seed", 0)))
    if kind == "least_squares":
        return problems.make_least_squares(
            rng, int(prob["N"]), int(prob["n"]),
            noise_sd=float(prob.get("noise_sd", 0.0)),
        )
    if kind == "logistic":
        return problems.make_logistic(
            rng, int(prob["N"]), int(prob["n"]),
            separation=float(prob.get("separation", 1.0)),
        )
    if kind == "sparse_recovery":
        inst = problems.make_sparse_recovery(
            rng, int(prob["N"]), int(prob["n"]),
            int(prob.get("support_size", 10)),
            noise_sd=float(prob.get("noise_sd", 0.0)),
        )
        return inst.problem
    if kind == "mlp":
        ds = _load_dataset(prob)
        return problems.make_tiny_mlp(
            rng, ds, int(prob.get("hidden", 8)),
            task=prob.get("task", "regression"),
        )
    if kind == "data_least_squares":
        ds = _load_dataset(prob)
        return problems.LeastSquares(ds.features, ds.targets,
                                     name=f"csv:{prob['data']}")
    if kind == "data_logistic":
        ds = _load_dataset(prob)
        return problems.Logistic(ds.features, ds.targets,
                                 name=f"csv:{prob['data']}")
    raise ParseError(f"unknown problem kind {kind!r}")


def _load_dataset(prob):
    path = prob.get("data")
    if path is None:
        raise ParseError(f"problem kind {prob['kind']!r} needs a 'data' path")
    fmt = prob.get("format", "csv")
    if fmt == "csv":
        return problems.load_csv(path)
    if fmt == "libsvm":
        return problems.load_libsvm(path)
    raise ParseError(f"unknown data format {fmt!r}")


def _reg_tag(reg):
    if isinstance(reg, Zero):
        return "zero"
    if isinstance(reg, L1):
        return f"l1_{reg.lam:g}"
    if isinstance(reg, L0):
        return f"l0_{reg.lam:g}"
    return f"l0ball_{reg.k}"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_trace_csv(path, trace):
    with open(path, "w") as fh:
        fh.write(f"# {TRACE_SCHEMA}\n")
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for rec in trace:
            row = (
                rec.t, rec.sigma_used, rec.rho, rec.step_norm_sq,
                rec.accepted, rec.F_sampled_before, rec.F_sampled_after,
                rec.F_full, rec.model_decrease, rec.batch_size,
                rec.assumption_rejected, rec.nnz, rec.wall_time,
            )
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_trace_csv(path):
    """Returns (columns, rows) with rows as lists of strings."""
    with open(path) as fh:
        schema = fh.readline().strip().lstrip("# ")
        if schema != TRACE_SCHEMA:
            raise ParseError(f"unexpected trace schema {schema!r} in {path}")
        cols = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return cols, rows


def save_model(path, x):
    """Flat parameter list with a dimension header."""
    x = np.asarray(x, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{x.size}\n")
        for v in x:
            fh.write(f"{v:.17g}\n")


def load_model(path):
    with open(path) as fh:
        n = int(fh.readline())
        vals = [float(line) for line in fh if line.strip()]
    if len(vals) != n:
        raise ParseError(f"model header says {n} params, file has {len(vals)}")
    return np.array(vals)


def _epoch_length(N, batch):
    return math.ceil(N / min(batch, N))


def _resolve_alpha(overrides, p, solver):
    alpha = overrides.get("alpha", "auto")
    if alpha == "auto":
        alpha = 1.0 / p.L_bound if p.L_bound else 1e-3
        if solver == "proxsgd":
            alpha = min(1.0, alpha)  # interpolation factor lives in (0, 1]
    return float(alpha)


def _run_cell(spec, p, solver, reg, seed, max_iter):
    if solver == "sr2":
        overrides = dict(spec.solvers["sr2"])
        overrides.setdefault("batch_size", spec.batch_size)
        overrides.setdefault("max_iter", max_iter)
        overrides["seed"] = seed
        cfg = sr2.SolverConfig(**overrides)
        return sr2.run(p, reg, np.zeros(p.n), cfg)
    overrides = dict(spec.solvers[solver])
    alpha = _resolve_alpha(overrides, p, solver)
    overrides.pop("alpha", None)
    overrides.setdefault("batch_size", spec.batch_size)
    overrides.setdefault("max_iter", max_iter)
    overrides["seed"] = seed
    cfg = baselines.BaselineConfig(alpha=alpha, **overrides)
    if solver == "proxgen":
        return baselines.run_proxgen(p, reg, np.zeros(p.n), cfg)
    return baselines.run_proxsgd(p, reg, np.zeros(p.n), cfg)


def _prune_sweep(p, x, thresholds):
    """Per-threshold (sparsity %, accuracy or None) pairs."""
    rows = []
    for alpha in thresholds:
        x_p, frac = diagnostics.prune(x, alpha)
        try:
            acc = diagnostics.accuracy(p, x_p)
        except (UnsupportedMetricError, NotImplementedError):
            acc = None
        rows.append((alpha, 100.0 * frac, acc))
    return rows


def _cell_job(args):
    spec, p, solver, reg, seed, max_iter, out_dir = args
    cell = f"{solver}_{_reg_tag(reg)}_s{seed}"
    result = _run_cell(spec, p, solver, reg, seed, max_iter)
    write_trace_csv(os.path.join(out_dir, f"trace_{cell}.csv"), result.trace)
    save_model(os.path.join(out_dir, f"model_{cell}.txt"), result.x)
    sweep = _prune_sweep(p, result.x, spec.prune_thresholds)
    emit_plot_data(out_dir, cell, result.trace, sweep)
    row = _summary_row(p, spec, solver, reg, seed, result, sweep)
    return cell, row


def _summary_row(p, spec, solver, reg, seed, result, sweep):
    report = diagnostics.sparsity_report(result.x, thresholds=(1e-3,))
    try:
        acc = diagnostics.accuracy(p, result.x)
    except (UnsupportedMetricError, NotImplementedError):
        acc = None
    lam = getattr(reg, "lam", None)
    F_final = p.full_value(result.x) + reg_value(reg, result.x)
    epoch_len = _epoch_length(p.N, spec.batch_size)
    return {
        "solver": solver,
        "reg": _reg_tag(reg),
        "lambda": lam,
        "seed": seed,
        "final_objective": F_final,
        "accuracy": acc,
        "pct_zero": report.pct_exact_zero,
        "pct_below_1e-3": report.pct_below[1e-3],
        "stop_reason": result.stop_reason,
        "iterations": len(result.trace),
        "epochs": len(result.trace) / epoch_len,
        "prune_sweep": [
            {"alpha": a, "sparsity_pct": s, "accuracy": acc_}
            for a, s, acc_ in sweep
        ],
    }


def plan_cells(spec):
    """(solver, regularizer, seed) triples after the skip rule."""
    skipped = set(spec.skipped)
    cells = []
    for solver in spec.solvers:
        for reg in spec.regularizers:
            if (solver, str(reg)) in skipped:
                continue
            for seed in spec.seeds:
                cells.append((solver, reg, seed))
    return cells


def run_experiments(spec, out_dir, jobs=1, config_path=None):
    """Execute the full experiment matrix; returns the summary row list.

    Per-cell failures are recorded in the summary without aborting the
    other cells.
    """
    os.makedirs(out_dir, exist_ok=True)
    if config_path is not None:
        shutil.copy(config_path, os.path.join(out_dir, "config.yaml"))
    p = build_problem(spec)
    if spec.max_iter is not None:
        max_iter = int(spec.max_iter)
    elif spec.epochs is not None:
        max_iter = int(spec.epochs) * _epoch_length(p.N, spec.batch_size)
    else:
        max_iter = 1000

    jobs_args = [
        (spec, p, solver, reg, seed, max_iter, out_dir)
        for solver, reg, seed in plan_cells(spec)
    ]
    summary = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell_job, jobs_args))
    else:
        results = []
        for args in jobs_args:
            try:
                results.append(_cell_job(args))
            except Exception as exc:  # record, keep going
                cell = f"{args[2]}_{_reg_tag(args[3])}_s{args[4]}"
                results.append((cell, {"solver": args[2],
                                       "reg": _reg_tag(args[3]),
                                       "seed": args[4],
                                       "error": str(exc)}))
    for cell, row in results:
        row["cell"] = cell
        summary.append(row)
    for solver, reg in spec.skipped:
        summary.append({"solver": solver, "reg": reg, "skipped": True,
                        "reason": "nonconvex regularizer unsupported by proxsgd"})
    _write_summary(out_dir, summary)
    return summary


def _write_summary(out_dir, summary):
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_plot_data(out_dir, cell, trace, sweep):
    """Two-column text files: pruning curves and convergence series."""
    with open(os.path.join(out_dir, f"prune_sparsity_{cell}.dat"), "w") as fh:
        for alpha, sparsity, _ in sweep:
            fh.write(f"{alpha:.17g} {sparsity:.17g}\n")
    if any(acc is not None for _, _, acc in sweep):
        with open(os.path.join(out_dir, f"prune_accuracy_{cell}.dat"), "w") as fh:
            for alpha, _, acc in sweep:
                fh.write(f"{alpha:.17g} {acc:.17g}\n")
    with open(os.path.join(out_dir, f"objective_{cell}.dat"), "w") as fh:
        for rec in trace:
            F = rec.F_full if rec.F_full is not None else rec.F_sampled_before
            fh.write(f"{rec.t} {F:.17g}\n")
    with open(os.path.join(out_dir, f"sigma_{cell}.dat"), "w") as fh:
        for rec in trace:
            fh.write(f"{rec.t} {rec.sigma_used:.17g}\n")


def rebuild_summary(out_dir):
    """Recompute summary.json from the traces and models in out_dir (the
    config copy written by run_experiments must be present)."""
    config_path = os.path.join(out_dir, "config.yaml")
    if not os.path.exists(config_path):
        raise ParseError(f"no config.yaml in {out_dir}; cannot rebuild")
    spec = parse_config(config_path)
    p = build_problem(spec)
    summary = []
    for solver, reg, seed in plan_cells(spec):
        cell = f"{solver}_{_reg_tag(reg)}_s{seed}"
        trace_path = os.path.join(out_dir, f"trace_{cell}.csv")
        model_path = os.path.join(out_dir, f"model_{cell}.txt")
        if not (os.path.exists(trace_path) and os.path.exists(model_path)):
            continue
        _, rows = read_trace_csv(trace_path)
        x = load_model(model_path)
        sweep = _prune_sweep(p, x, spec.prune_thresholds)

        class _Shim:
            pass

        shim = _Shim()
        shim.x = x
        shim.trace = rows
        shim.stop_reason = "rebuilt"
        row = _summary_row(p, spec, solver, reg, seed, shim, sweep)
        row["cell"] = cell
        summary.append(row)
    for solver, reg in spec.skipped:
        summary.append({"solver": solver, "reg": reg, "skipped": True,
                        "reason": "nonconvex regularizer unsupported by proxsgd"})
    _write_summary(out_dir, summary)
    return summary
