"""Per-pair reuse of recent function evaluations for the curvature fit.

Sampling fresh points for every 2x2 fit would triple the per-step query
bill.  Instead each pair banks the gradient probes of the two preceding
steps (plus the fresh samples drawn when a subspace period begins) and
replays them, recentred on the current slice point:

- first step of a period: nothing to reuse, draw 3 fresh points on a small
  circle around the current point (re-drawn while their fit system is
  ill-conditioned);
- second step: reuse the previous step's 2 probes and 3 fresh samples;
- every later step: reuse the 4 gradient probes of the two preceding steps.

The cache holds records for open plans only; it is cleared on every plan
switch and never serves points recorded under a different plan.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .estimator import GAMMA_FLOOR, quad_monomials
from .subspace import PairProjection, SubspacePlan

__all__ = ["EvalRecord", "EvalCache", "GatherResult", "PlanMismatchError"]


class PlanMismatchError(ValueError):
    """A record or query referenced a pair that is not in the current plan."""


@dataclass(frozen=True)
class EvalRecord:
    """One banked evaluation: step index, absolute slice coordinates, value."""

    step: int
    point: np.ndarray  # (2,) coordinates under the pair's projection
    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"cached value must be finite, got {self.value}")


class GatherResult(NamedTuple):
    samples: list[tuple[np.ndarray, float]]  # (theta_bar, f) recentred, ready to fit
    fresh: list[np.ndarray]  # absolute slice points still needing evaluation
    degraded: bool  # True if fresh sampling never met the conditioning floor


class EvalCache:
    """Two-step evaluation memory, kept separately per coordinate pair."""

    def __init__(self, gamma_floor: float = GAMMA_FLOOR, max_attempts: int = 10):
        self.gamma_floor = gamma_floor
        self.max_attempts = max_attempts
        self._plan: SubspacePlan | None = None
        self._probes: dict[tuple[int, int], dict[int, list[EvalRecord]]] = {}
        self._fresh: dict[tuple[int, int], dict[int, list[EvalRecord]]] = {}

    @property
    def plan(self) -> SubspacePlan | None:
        return self._plan

    def reset(self, plan: SubspacePlan) -> None:
        """Adopt a new plan, dropping everything recorded under the old one."""
        self._plan = plan
        self._probes = {p.pair: {} for p in plan.pairs}
        self._fresh = {p.pair: {} for p in plan.pairs}

    def _store_for(self, store, pair: PairProjection):
        if self._plan is None or pair.pair not in store:
            raise PlanMismatchError(
                f"pair {pair.pair} is not part of the cache's current plan"
            )
        return store[pair.pair]

    @staticmethod
    def _evict(per_step: dict[int, list[EvalRecord]], k: int) -> None:
        for step in [s for s in per_step if s < k - 2]:
            del per_step[step]

    def record_probes(self, k: int, pair: PairProjection, records: list[EvalRecord]) -> None:
        """Bank this step's gradient probes; drops entries older than k-2."""
        store = self._store_for(self._probes, pair)
        store.setdefault(k, []).extend(records)
        self._evict(store, k)

    def record_fresh(self, k: int, pair: PairProjection, records: list[EvalRecord]) -> None:
        """Bank period-start fresh samples; drops entries older than k-2."""
        store = self._store_for(self._fresh, pair)
        store.setdefault(k, []).extend(records)
        self._evict(store, k)

    def gather_samples(
        self,
        k: int,
        T: int,
        pair: PairProjection,
        theta_current: np.ndarray,
        rng: np.random.Generator,
        radius: float,
    ) -> GatherResult:
        """Assemble the fit sample set for step k of the current plan.

        Returns recentred (theta_bar, f) samples plus any fresh absolute
        points the caller must still evaluate (non-empty only on a period's
        first step). The caller records fresh evaluations back via
        :meth:`record_fresh`.
        """
        probes = self._store_for(self._probes, pair)
        fresh_store = self._store_for(self._fresh, pair)
        theta_current = np.asarray(theta_current, dtype=float)

        phase = k % T
        if phase == 0:
            points, degraded = self._sample_conditioned(theta_current, rng, radius)
            return GatherResult([], points, degraded)
        if phase == 1:
            records = probes.get(k - 1, []) + fresh_store.get(k - 1, [])
        else:
            records = probes.get(k - 2, []) + probes.get(k - 1, [])
        samples = [(rec.point - theta_current, rec.value) for rec in records]
        return GatherResult(samples, [], False)

    def _sample_conditioned(
        self, theta: np.ndarray, rng: np.random.Generator, radius: float
    ) -> tuple[list[np.ndarray], bool]:
        """Draw 3 points uniformly on the radius circle around theta.

        Redraws (up to max_attempts) while the implied Gram matrix of the fit
        is below the conditioning floor; if the floor is never met, the
        best-conditioned batch is returned with a degraded flag.
        """
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        best_points: list[np.ndarray] | None = None
        best_eig = -np.inf
        for _ in range(self.max_attempts):
            angles = rng.uniform(0.0, 2.0 * np.pi, size=3)
            rel = radius * np.column_stack([np.cos(angles), np.sin(angles)])
            phi = np.vstack([quad_monomials(rel[i]) for i in range(3)])
            min_eig = float(np.linalg.eigvalsh(phi.T @ phi)[0])
            if min_eig > best_eig:
                best_eig = min_eig
                best_points = [theta + rel[i] for i in range(3)]
            if min_eig >= self.gamma_floor:
                return best_points, False
        return best_points, True
