"""Reference zeroth-order baselines sharing the package's metering and search.

All three descend along a direction derived from the randomized
forward-difference gradient estimate (average of q Gaussian directional
differences) and use the exact same Armijo backtracking implementation as
the subspace optimizer, so query counts are comparable across algorithms:

- rspg:    the raw estimate;
- signsgd: its componentwise sign;
- adamm:   adaptive momentum (bias-unaware, max-stabilized second moment).

``fd_full_hessian`` is a correctness reference for the classical randomized
full-space Hessian estimate; its O(d^2) query appetite is the reason the
subspace method exists, so it is guarded to small d and never benchmarked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .oracle import CountedOracle, Objective
from .optimizer import BudgetedOptimizer, LineSearch, TraceRow, armijo_search

__all__ = [
    "BaselineConfig",
    "rge_gradient",
    "RspgOptimizer",
    "SignSgdOptimizer",
    "AdammOptimizer",
    "BASELINES",
    "run_baseline",
    "fd_full_hessian",
]


@dataclass(frozen=True)
class BaselineConfig:
    """Hyperparameters shared by the smoothing baselines."""

    max_evals: int
    seed: int = 0
    q: int = 10
    eps: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.5
    delta: float = 1e-8
    lam_reg: float = 1e-6
    line_search: LineSearch = field(default_factory=LineSearch)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        for name in ("beta1", "beta2"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0,1)")


def rge_gradient(
    oracle: CountedOracle,
    x: np.ndarray,
    q: int,
    eps: float,
    rng: np.random.Generator,
    f_x: float,
) -> np.ndarray:
    """Averaged forward-difference gradient along q standard-normal directions.

    ``f_x`` is the already-paid value at x, so this spends exactly q queries
    (q+1 including the caller's f(x)).
    """
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for _ in range(q):
        u = rng.standard_normal(x.shape[0])
        g += (oracle(x + eps * u) - f_x) / eps * u
    return g / q


class _RgeDescent(BudgetedOptimizer):
    """Shared step: estimate, pick a direction, backtrack, record."""

    def __init__(
        self,
        oracle: CountedOracle,
        x0: np.ndarray,
        cfg: BaselineConfig,
        rng: np.random.Generator | None = None,
    ):
        super().__init__(oracle, x0, cfg.max_evals)
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed) if rng is None else rng

    def _direction(self, g: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def step(self) -> TraceRow:
        cfg = self.cfg
        f_x = self.oracle(self.x)
        g = rge_gradient(self.oracle, self.x, cfg.q, cfg.eps, self.rng, f_x)
        v = self._direction(g)
        rho, accepted, f_new = armijo_search(
            self.oracle, self.x, v, f_x, cfg.line_search
        )
        if accepted:
            self.x = self.x - rho * v
            f_accepted = f_new
        else:
            f_accepted = f_x
        self.k += 1
        row = TraceRow(self.k, self.oracle.count, f_accepted)
        self.trace.append(row)
        return row


class RspgOptimizer(_RgeDescent):
    """Randomized stochastic projected gradient: descend along the estimate."""

    def _direction(self, g: np.ndarray) -> np.ndarray:
        return g


class SignSgdOptimizer(_RgeDescent):
    """Descend along the componentwise sign of the estimate (0 stays 0)."""

    def _direction(self, g: np.ndarray) -> np.ndarray:
        return np.sign(g)


class AdammOptimizer(_RgeDescent):
    """Adaptive-momentum direction on the estimate.

    The momentum state advances on every step, whether or not the line
    search accepts the resulting move.
    """

    def __init__(self, oracle, x0, cfg, rng=None):
        super().__init__(oracle, x0, cfg, rng)
        d = oracle.dim
        self.m_avg = np.zeros(d)
        self.v_avg = np.zeros(d)
        self.v_hat = np.zeros(d)

    def _direction(self, g: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        self.m_avg = cfg.beta1 * self.m_avg + (1.0 - cfg.beta1) * g
        self.v_avg = cfg.beta2 * self.v_avg + (1.0 - cfg.beta2) * g * g
        self.v_hat = np.maximum(self.v_hat, self.v_avg)
        return self.m_avg / (np.sqrt(self.v_hat) + cfg.delta)


BASELINES = {
    "rspg": RspgOptimizer,
    "signsgd": SignSgdOptimizer,
    "adamm": AdammOptimizer,
}


def run_baseline(
    objective: Objective, x0: np.ndarray, cfg: BaselineConfig, method: str
) -> list[TraceRow]:
    """Fresh oracle, fresh rng from cfg.seed, full run of the named baseline."""
    try:
        cls = BASELINES[method]
    except KeyError:
        raise ValueError(
            f"unknown baseline {method!r}; expected one of {sorted(BASELINES)}"
        ) from None
    oracle = CountedOracle(objective)
    return cls(oracle, x0, cfg).run()


def fd_full_hessian(
    oracle: CountedOracle,
    x: np.ndarray,
    q: int,
    eps: float,
    lam_reg: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Randomized rank-one-sum estimate of the full d x d Hessian.

    Averages central second differences along q Gaussian directions and adds
    lam_reg * I. Costs 2q+1 queries; guarded to d <= 50 because the query
    bill grows quadratically with dimension in any serious use.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    if d > 50:
        raise ValueError(f"full Hessian estimation is guarded to d <= 50, got d={d}")
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    f0 = oracle(x)
    H = np.zeros((d, d))
    for _ in range(q):
        u = rng.standard_normal(d)
        second_diff = oracle(x + eps * u) + oracle(x - eps * u) - 2.0 * f0
        H += (second_diff / (2.0 * eps * eps)) * np.outer(u, u)
    return H / q + lam_reg * np.eye(d)
