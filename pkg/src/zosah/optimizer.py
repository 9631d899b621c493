"""Driver for the subspace approximate-Hessian optimizer.

One outer step: refresh the coordinate-pair plan if the period rolled over,
pay one query for the current value, then for every pair measure the 2-d
slice gradient, obtain a 2x2 curvature matrix (least-squares fit on cached
evaluations by default, coordinate finite differences in the ablation mode),
repair it to be positive definite, and accumulate the per-pair Newton
directions into one full-space update. A backtracking line search along the
negated update either accepts a step length or leaves the iterate unchanged,
so the accepted value sequence never increases.

The line search and the budgeted run loop live here and are shared verbatim
by the baseline optimizers, keeping query accounting comparable across
algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cache import EvalCache, EvalRecord
from .estimator import (
    GAMMA_FLOOR,
    HessianUnavailableError,
    InsufficientSamplesError,
    build_fit_system,
    estimate_gradient,
    fd_subspace_hessian,
    make_pd,
    newton_direction,
    solve_hessian,
)
from .oracle import CountedOracle, DimensionMismatchError, Objective
from .subspace import make_plan

__all__ = [
    "LineSearch",
    "ZosahConfig",
    "TraceRow",
    "StepStats",
    "armijo_search",
    "BudgetedOptimizer",
    "ZosahOptimizer",
    "run_zosah",
    "default_subspace_size",
    "HESSIAN_MODES",
]

HESSIAN_MODES = ("fit", "diag", "fd")


@dataclass(frozen=True)
class LineSearch:
    """Backtracking constants shared by every optimizer in the package."""

    init_step: float = 1.0
    c1: float = 1e-4
    shrink: float = 0.5
    min_step: float = 1e-6

    def __post_init__(self):
        if self.init_step <= 0 or self.min_step <= 0:
            raise ValueError("step sizes must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"shrink must lie in (0,1), got {self.shrink}")
        if not 0.0 < self.c1 < 1.0:
            raise ValueError(f"c1 must lie in (0,1), got {self.c1}")


@dataclass(frozen=True)
class ZosahConfig:
    """Hyperparameters of one optimizer run.

    ``m`` is the number of coordinates worked on per period (even, at most
    the problem dimension); None picks min(d, 20) rounded down to even.
    ``T`` is the number of steps a coordinate plan stays alive.
    """

    max_evals: int
    seed: int = 0
    m: int | None = None
    T: int = 20
    eps: float = 1e-3
    kappa: float = 0.1
    hess_radius: float = 0.05
    gamma_floor: float = GAMMA_FLOOR
    hessian_mode: str = "fit"
    line_search: LineSearch = field(default_factory=LineSearch)

    def __post_init__(self):
        if self.max_evals < 0:
            raise ValueError("max_evals must be non-negative")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        for name in ("eps", "kappa", "hess_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.m is not None and (self.m < 2 or self.m % 2 != 0):
            raise ValueError(f"m must be an even integer >= 2, got {self.m}")
        if self.hessian_mode not in HESSIAN_MODES:
            raise ValueError(
                f"hessian_mode must be one of {HESSIAN_MODES}, got {self.hessian_mode!r}"
            )


@dataclass(frozen=True)
class TraceRow:
    """One convergence record: completed steps, queries paid, accepted value."""

    step: int
    cum_evals: int
    f_value: float


@dataclass(frozen=True)
class StepStats:
    """Per-step query accounting (1 base query + the categories below)."""

    step: int
    grad_evals: int
    hess_evals: int  # fresh curvature samples paid this step
    search_evals: int
    pair_hess_evals: tuple[int, ...]
    accepted: bool
    rho: float
    degraded_pairs: int

    @property
    def total_evals(self) -> int:
        return 1 + self.grad_evals + self.hess_evals + self.search_evals


def default_subspace_size(d: int) -> int:
    """min(d, 20) rounded down to even; the default per-period coordinate count."""
    m = min(d, 20)
    return m - (m % 2)


def armijo_search(
    oracle: CountedOracle,
    x: np.ndarray,
    v: np.ndarray,
    f_x: float,
    ls: LineSearch | None = None,
) -> tuple[float, bool, float]:
    """Backtracking line search along -v.

    Tries rho = init_step, then geometrically shrinks, accepting the first
    rho with f(x - rho v) <= f_x - c1 rho ||v||^2. The floor test runs after
    each trial, so a search that never succeeds pays one trial per rho down
    to the first value below min_step. Returns (rho, accepted, f_new) with
    f_new == f_x when nothing was accepted; a zero direction returns
    immediately without spending queries.
    """
    if ls is None:
        ls = LineSearch()
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if vv == 0.0:
        return 0.0, False, f_x
    rho = ls.init_step
    while True:
        f_try = oracle(x - rho * v)
        if np.isfinite(f_try) and f_try <= f_x - ls.c1 * rho * vv:
            return rho, True, f_try
        if rho < ls.min_step:
            return rho, False, f_x
        rho *= ls.shrink


class BudgetedOptimizer:
    """Shared run loop: one initial value row, then steps until the budget.

    The budget is checked between steps only; a step begun under budget runs
    to completion, so the final count can overshoot by at most one step's
    worst-case cost.
    """

    def __init__(self, oracle: CountedOracle, x0: np.ndarray, max_evals: int):
        self.oracle = oracle
        self.x = np.array(x0, dtype=float)
        if self.x.shape != (oracle.dim,):
            raise DimensionMismatchError(
                f"x0 must have shape ({oracle.dim},), got {self.x.shape}"
            )
        self.max_evals = int(max_evals)
        self.k = 0  # completed steps
        self.trace: list[TraceRow] = []

    def step(self) -> TraceRow:
        raise NotImplementedError

    def run(self) -> list[TraceRow]:
        if not self.trace:
            f0 = self.oracle(self.x)
            self.trace.append(TraceRow(0, self.oracle.count, f0))
        while self.oracle.count < self.max_evals:
            self.step()
        return list(self.trace)


class ZosahOptimizer(BudgetedOptimizer):
    """Subspace approximate-Hessian optimizer with evaluation caching."""

    def __init__(
        self,
        oracle: CountedOracle,
        x0: np.ndarray,
        cfg: ZosahConfig,
        rng: np.random.Generator | None = None,
    ):
        super().__init__(oracle, x0, cfg.max_evals)
        d = oracle.dim
        if d < 2:
            raise ValueError(f"need dimension >= 2 to form coordinate pairs, got d={d}")
        self.cfg = cfg
        self.m = cfg.m if cfg.m is not None else default_subspace_size(d)
        if self.m % 2 != 0 or not 2 <= self.m <= d:
            raise ValueError(f"m must be even with 2 <= m <= d={d}, got {self.m}")
        self.rng = np.random.default_rng(cfg.seed) if rng is None else rng
        self.plan = None
        self.cache = EvalCache(cfg.gamma_floor)
        self.stats: list[StepStats] = []

    def step(self) -> TraceRow:
        cfg = self.cfg
        k = self.k
        if self.plan is None or k % cfg.T == 0:
            self.plan = make_plan(self.oracle.dim, self.m, self.rng, step=k)
            self.cache.reset(self.plan)

        count0 = self.oracle.count
        f_x = self.oracle(self.x)
        v = np.zeros_like(self.x)
        grad_evals = 0
        pair_hess: list[int] = []
        degraded = 0

        for p in self.plan.pairs:
            theta = p.project(self.x)
            grad = estimate_gradient(self.oracle, self.x, p, cfg.eps, f_x)
            grad_evals += 2
            fresh_paid = 0

            if cfg.hessian_mode == "fd":
                A = fd_subspace_hessian(
                    self.oracle, self.x, p, cfg.eps,
                    f_x, grad.probes[0][1], grad.probes[1][1],
                )
                fresh_paid = 3
            else:
                gathered = self.cache.gather_samples(
                    k, cfg.T, p, theta, self.rng, cfg.hess_radius
                )
                if gathered.degraded:
                    degraded += 1
                samples = list(gathered.samples)
                fresh_records = []
                for point in gathered.fresh:
                    f_point = self.oracle(p.lift(point - theta, self.x))
                    fresh_paid += 1
                    fresh_records.append(EvalRecord(k, point, f_point))
                    samples.append((point - theta, f_point))
                if fresh_records:
                    self.cache.record_fresh(k, p, fresh_records)
                try:
                    fit = build_fit_system(samples, grad.g, f_x)
                    A = solve_hessian(fit, cfg.gamma_floor)
                except (InsufficientSamplesError, HessianUnavailableError):
                    A = None
                self.cache.record_probes(
                    k, p, [EvalRecord(k, pt, fv) for pt, fv in grad.probes]
                )

            pair_hess.append(fresh_paid)
            if A is None:
                A_bar = cfg.kappa * np.eye(2)  # scaled gradient fallback
            else:
                if cfg.hessian_mode == "diag":
                    A = np.diag(np.diag(A))
                A_bar = make_pd(A, cfg.kappa)
            v = p.lift(newton_direction(A_bar, grad.g), v)

        hess_evals = sum(pair_hess)
        rho, accepted, f_new = armijo_search(
            self.oracle, self.x, v, f_x, cfg.line_search
        )
        search_evals = self.oracle.count - count0 - 1 - grad_evals - hess_evals
        if accepted:
            self.x = self.x - rho * v
            f_accepted = f_new
        else:
            f_accepted = f_x

        self.k += 1
        row = TraceRow(self.k, self.oracle.count, f_accepted)
        self.trace.append(row)
        self.stats.append(
            StepStats(
                step=k,
                grad_evals=grad_evals,
                hess_evals=hess_evals,
                search_evals=search_evals,
                pair_hess_evals=tuple(pair_hess),
                accepted=accepted,
                rho=rho,
                degraded_pairs=degraded,
            )
        )
        return row


def run_zosah(
    objective: Objective, x0: np.ndarray, cfg: ZosahConfig
) -> list[TraceRow]:
    """Convenience wrapper: fresh oracle, fresh rng from cfg.seed, full run."""
    oracle = CountedOracle(objective)
    return ZosahOptimizer(oracle, x0, cfg).run()
