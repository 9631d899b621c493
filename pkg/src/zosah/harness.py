"""Experiment runner: multi-seed execution, trace persistence, summaries.

An experiment is (algorithm, objective, budget, seeds, hyperparameters).
Each seed runs with its own oracle and random generator and yields one
convergence trace; traces are written as one CSV per seed plus a combined
CSV, formatted so that identical configurations reproduce identical bytes.
``summarize`` reduces a directory of traces to per-checkpoint statistics
with step-function interpolation (the value at a checkpoint is the last
accepted value at or before it; no lookahead).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import BASELINES, BaselineConfig, run_baseline
from .oracle import (
    Objective,
    load_libsvm,
    logistic_objective,
    rosenbrock_objective,
)
from .optimizer import TraceRow, ZosahConfig, run_zosah

__all__ = [
    "ALGORITHMS",
    "DATA_DIR_ENV",
    "TRACE_HEADER",
    "UsageError",
    "ExperimentConfig",
    "resolve_objective",
    "initial_point",
    "run_single",
    "run_experiment",
    "write_trace_csv",
    "read_trace_csv",
    "summarize",
    "SummaryRow",
    "write_summary_csv",
]

DATA_DIR_ENV = "ZOSAH_DATA_DIR"

_ZOSAH_MODES = {"zosah": "fit", "zosah-diag": "diag", "zosah-fd": "fd"}
ALGORITHMS = tuple(_ZOSAH_MODES) + tuple(BASELINES)

TRACE_HEADER = "seed,step,cum_evals,f_value"
SUMMARY_HEADER = "cum_evals,mean,std,min,max"


class UsageError(ValueError):
    """Bad experiment configuration (unknown id, malformed value)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment byte-for-byte."""

    alg: str
    obj: str
    max_evals: int
    seeds: tuple[int, ...] = (0,)
    x0: str | tuple[float, ...] = "auto"
    m: int | None = None
    T: int = 20
    eps: float = 1e-3
    kappa: float = 0.1
    hess_radius: float = 0.05
    q: int = 10
    jobs: int = 1

    def __post_init__(self):
        if self.alg not in ALGORITHMS:
            raise UsageError(
                f"unknown algorithm {self.alg!r}; expected one of {ALGORITHMS}"
            )
        if not self.seeds:
            raise UsageError("seeds must be non-empty")
        if self.max_evals <= 0:
            raise UsageError("max_evals must be positive")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")


def resolve_objective(obj_id: str) -> Objective:
    """Map an objective id to an Objective.

    ``rosenbrock`` or ``logistic:<path>``; relative logistic paths are
    resolved against $ZOSAH_DATA_DIR when that variable is set.
    """
    if obj_id == "rosenbrock":
        return rosenbrock_objective()
    if obj_id.startswith("logistic:"):
        raw = obj_id[len("logistic:"):]
        if not raw:
            raise UsageError("logistic objective needs a path: logistic:<path>")
        path = Path(raw)
        root = os.environ.get(DATA_DIR_ENV)
        if root and not path.is_absolute() and not path.exists():
            path = Path(root) / path
        return logistic_objective(load_libsvm(path))
    raise UsageError(
        f"unknown objective id {obj_id!r}; expected 'rosenbrock' or 'logistic:<path>'"
    )


def initial_point(policy: str | tuple[float, ...], dim: int) -> np.ndarray:
    """Resolve an x0 policy: zeros, the standard Rosenbrock start, or explicit."""
    if isinstance(policy, tuple):
        if len(policy) != dim:
            raise UsageError(
                f"explicit x0 has {len(policy)} entries but the objective has dimension {dim}"
            )
        return np.asarray(policy, dtype=float)
    if policy == "zeros":
        return np.zeros(dim)
    if policy == "standard-rosenbrock":
        if dim != 2:
            raise UsageError("standard-rosenbrock start requires a 2-d objective")
        return np.array([-1.2, 1.0])
    raise UsageError(f"unknown x0 policy {policy!r}")


def _resolve_x0(cfg: ExperimentConfig, dim: int) -> np.ndarray:
    policy = cfg.x0
    if policy == "auto":
        policy = "standard-rosenbrock" if cfg.obj == "rosenbrock" else "zeros"
    return initial_point(policy, dim)


def run_single(objective: Objective, cfg: ExperimentConfig, seed: int) -> list[TraceRow]:
    """One seed's run; owns its oracle and random generator."""
    x0 = _resolve_x0(cfg, objective.dim)
    if cfg.alg in _ZOSAH_MODES:
        zcfg = ZosahConfig(
            max_evals=cfg.max_evals,
            seed=seed,
            m=cfg.m,
            T=cfg.T,
            eps=cfg.eps,
            kappa=cfg.kappa,
            hess_radius=cfg.hess_radius,
            hessian_mode=_ZOSAH_MODES[cfg.alg],
        )
        return run_zosah(objective, x0, zcfg)
    bcfg = BaselineConfig(max_evals=cfg.max_evals, seed=seed, q=cfg.q, eps=cfg.eps)
    return run_baseline(objective, x0, bcfg, cfg.alg)


def run_experiment(cfg: ExperimentConfig, out_dir) -> list[Path]:
    """Run every seed, write per-seed CSVs plus combined.csv; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    objective = resolve_objective(cfg.obj)
    _resolve_x0(cfg, objective.dim)  # fail fast on a bad policy before running

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            traces = list(
                pool.map(lambda s: run_single(objective, cfg, s), cfg.seeds)
            )
    else:
        traces = [run_single(objective, cfg, seed) for seed in cfg.seeds]

    paths = []
    for seed, rows in zip(cfg.seeds, traces):
        path = out / f"seed_{seed}.csv"
        write_trace_csv(path, {seed: rows})
        paths.append(path)
    combined = out / "combined.csv"
    write_trace_csv(combined, dict(zip(cfg.seeds, traces)))
    paths.append(combined)
    return paths


def _format_float(value: float) -> str:
    return format(value, ".17g")


def write_trace_csv(path, rows_by_seed: dict[int, list[TraceRow]]) -> None:
    """Write traces with a fixed header, 17-significant-digit values, LF ends."""
    lines = [TRACE_HEADER]
    for seed in rows_by_seed:
        for row in rows_by_seed[seed]:
            lines.append(
                f"{seed},{row.step},{row.cum_evals},{_format_float(row.f_value)}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def read_trace_csv(path) -> dict[int, list[TraceRow]]:
    """Inverse of :func:`write_trace_csv`; rows grouped by seed column."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"{path}: missing trace header {TRACE_HEADER!r}")
    out: dict[int, list[TraceRow]] = {}
    for ln in lines[1:]:
        seed_s, step_s, evals_s, f_s = ln.split(",")
        out.setdefault(int(seed_s), []).append(
            TraceRow(int(step_s), int(evals_s), float(f_s))
        )
    return out


@dataclass(frozen=True)
class SummaryRow:
    cum_evals: int
    mean: float
    std: float
    min: float
    max: float


def summarize(
    rows_by_seed: dict[int, list[TraceRow]], grid: int
) -> list[SummaryRow]:
    """Per-checkpoint statistics over seeds with step-function interpolation.

    At each checkpoint (grid, 2*grid, ...) a seed contributes its last
    f-value at cum_evals <= checkpoint. Checkpoints where some seed has no
    value yet are omitted. std is the sample standard deviation (0 for a
    single seed).
    """
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    if not rows_by_seed:
        raise ValueError("no traces to summarize")
    last = max(rows[-1].cum_evals for rows in rows_by_seed.values() if rows)
    out: list[SummaryRow] = []
    for checkpoint in range(grid, last + 1, grid):
        values = []
        for rows in rows_by_seed.values():
            at_or_before = [r.f_value for r in rows if r.cum_evals <= checkpoint]
            if not at_or_before:
                values = []
                break
            values.append(at_or_before[-1])
        if not values:
            continue
        arr = np.asarray(values)
        std = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
        out.append(
            SummaryRow(checkpoint, float(arr.mean()), std, float(arr.min()), float(arr.max()))
        )
    return out


def write_summary_csv(path, rows: list[SummaryRow]) -> None:
    lines = [SUMMARY_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [str(r.cum_evals)]
                + [_format_float(v) for v in (r.mean, r.std, r.min, r.max)]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
