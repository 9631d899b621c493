"""Tests for the line search, step accounting, and the optimizer driver."""

import numpy as np
import pytest

import zosah.optimizer as optimizer_mod
from zosah.estimator import HessianUnavailableError, make_pd
from zosah.oracle import (
    CountedOracle,
    DimensionMismatchError,
    Objective,
    quadratic_objective,
    rosenbrock_objective,
)
from zosah.optimizer import (
    LineSearch,
    TraceRow,
    ZosahConfig,
    ZosahOptimizer,
    armijo_search,
    default_subspace_size,
    run_zosah,
)

ROTATED = np.array([[5.5, 4.5], [4.5, 5.5]])


def sphere(d):
    return Objective(lambda x: 0.5 * float(x @ x), d)


class TestLineSearchConfig:
    def test_defaults(self):
        ls = LineSearch()
        assert ls.init_step == 1.0
        assert ls.c1 == 1e-4
        assert ls.shrink == 0.5
        assert ls.min_step == 1e-6

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"init_step": 0.0},
            {"min_step": 0.0},
            {"min_step": -1e-9},
            {"shrink": 0.0},
            {"shrink": 1.0},
            {"c1": 0.0},
            {"c1": 1.0},
        ],
    )
    def test_invalid_fields(self, kwargs):
        with pytest.raises(ValueError):
            LineSearch(**kwargs)


class TestZosahConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_evals": -1},
            {"max_evals": 100, "T": 0},
            {"max_evals": 100, "eps": 0.0},
            {"max_evals": 100, "kappa": 0.0},
            {"max_evals": 100, "hess_radius": -0.05},
            {"max_evals": 100, "m": 3},
            {"max_evals": 100, "m": 0},
            {"max_evals": 100, "hessian_mode": "newton"},
        ],
    )
    def test_invalid_fields(self, kwargs):
        with pytest.raises(ValueError):
            ZosahConfig(**kwargs)

    def test_zero_budget_is_legal(self):
        assert ZosahConfig(max_evals=0).max_evals == 0


class TestDefaultSubspaceSize:
    @pytest.mark.parametrize("d,m", [(2, 2), (3, 2), (4, 4), (7, 6), (20, 20), (21, 20), (100, 20)])
    def test_values(self, d, m):
        assert default_subspace_size(d) == m


class TestArmijoSearch:
    def test_accepts_full_step(self):
        oracle = CountedOracle(sphere(1))
        rho, accepted, f_new = armijo_search(oracle, np.array([1.0]), np.array([1.0]), 0.5)
        assert (rho, accepted, f_new) == (1.0, True, 0.0)
        assert oracle.count == 1

    def test_zero_direction_costs_nothing(self):
        oracle = CountedOracle(sphere(2))
        rho, accepted, f_new = armijo_search(oracle, np.ones(2), np.zeros(2), 1.0)
        assert (rho, accepted, f_new) == (0.0, False, 1.0)
        assert oracle.count == 0

    def test_total_failure_pays_twenty_one_trials(self):
        # f grows along -v, so every trial fails; one trial per rho down to
        # the first value below the floor: 0.5^0 .. 0.5^20 = 21 queries
        obj = Objective(lambda x: float(x[0]), 1)
        oracle = CountedOracle(obj)
        rho, accepted, f_new = armijo_search(oracle, np.array([0.0]), np.array([-1.0]), 0.0)
        assert oracle.count == 21
        assert not accepted
        assert f_new == 0.0
        assert rho == pytest.approx(0.5**20)
        assert rho < 1e-6

    def test_non_finite_trial_is_rejected_then_recovers(self):
        def f(x):
            y = float(x[0])
            return float("nan") if y < 0 else 0.5 * y * y

        oracle = CountedOracle(Objective(f, 1))
        rho, accepted, f_new = armijo_search(oracle, np.array([1.0]), np.array([2.0]), 0.5)
        assert accepted
        assert rho == 0.5
        assert f_new == 0.0
        assert oracle.count == 2

    def test_custom_constants(self):
        obj = Objective(lambda x: float(x[0]) ** 2, 1)
        oracle = CountedOracle(obj)
        ls = LineSearch(init_step=0.25, c1=0.5, shrink=0.1, min_step=0.05)
        rho, accepted, f_new = armijo_search(oracle, np.array([1.0]), np.array([1.0]), 1.0, ls)
        assert accepted and rho == 0.25
        assert f_new == pytest.approx(0.5625)
        assert oracle.count == 1


class TestStepAccounting:
    """Per-step query formulas on a quadratic where the full step is accepted."""

    def run_steps(self, T=5, n_steps=4):
        oracle = CountedOracle(sphere(6))
        cfg = ZosahConfig(max_evals=10_000, seed=0, m=6, T=T)
        opt = ZosahOptimizer(oracle, np.full(6, 1.5), cfg)
        f0 = oracle(opt.x)
        opt.trace.append(TraceRow(0, oracle.count, f0))
        for _ in range(n_steps):
            opt.step()
        return opt

    def test_period_start_and_mid_period_totals(self):
        m = 6
        opt = self.run_steps()
        start, mid = opt.stats[0], opt.stats[1]

        # first step of a period: 1 value + m gradient probes
        # + 3 fresh curvature samples per pair + 1 accepted search trial
        assert start.grad_evals == m
        assert start.pair_hess_evals == (3, 3, 3)
        assert start.search_evals == 1
        assert start.total_evals == 1 + m + 3 * (m // 2) + 1 == 17

        # later steps fit on cached probes: 1 + m + 1
        assert mid.grad_evals == m
        assert mid.pair_hess_evals == (0, 0, 0)
        assert mid.search_evals == 1
        assert mid.total_evals == 1 + m + 1 == 8

    def test_trace_deltas_match_stats(self):
        opt = self.run_steps(n_steps=6)
        for st, before, after in zip(opt.stats, opt.trace, opt.trace[1:]):
            assert after.cum_evals - before.cum_evals == st.total_evals
            assert st.total_evals == 1 + st.grad_evals + st.hess_evals + st.search_evals
            assert st.hess_evals == sum(st.pair_hess_evals)

    def test_fresh_sampling_profile_over_periods(self):
        # T=3 phases: fresh samples at steps 0, 3, 6 only
        oracle = CountedOracle(sphere(4))
        cfg = ZosahConfig(max_evals=10_000, seed=1, m=4, T=3)
        opt = ZosahOptimizer(oracle, np.full(4, 2.0), cfg)
        oracle(opt.x)
        for _ in range(7):
            opt.step()
        for st in opt.stats:
            expected = (3, 3) if st.step % 3 == 0 else (0, 0)
            assert st.pair_hess_evals == expected
            assert st.grad_evals == 4

    def test_fd_mode_pays_three_per_pair_every_step(self):
        oracle = CountedOracle(sphere(4))
        cfg = ZosahConfig(max_evals=10_000, seed=1, m=4, T=3, hessian_mode="fd")
        opt = ZosahOptimizer(oracle, np.full(4, 2.0), cfg)
        oracle(opt.x)
        for _ in range(5):
            opt.step()
        for st in opt.stats:
            assert st.pair_hess_evals == (3, 3)


class TestPlanSchedule:
    def test_plan_refreshes_every_T_steps(self):
        oracle = CountedOracle(rosenbrock_objective())
        cfg = ZosahConfig(max_evals=100_000, seed=4, m=2, T=4)
        opt = ZosahOptimizer(oracle, np.array([-1.2, 1.0]), cfg)
        oracle(opt.x)
        created = []
        for _ in range(10):
            opt.step()
            created.append(opt.plan.created_at_step)
        assert created == [0, 0, 0, 0, 4, 4, 4, 4, 8, 8]

    def test_plan_indices_cover_m_coordinates(self):
        oracle = CountedOracle(sphere(10))
        cfg = ZosahConfig(max_evals=1000, seed=2, m=6, T=5)
        opt = ZosahOptimizer(oracle, np.ones(10), cfg)
        oracle(opt.x)
        opt.step()
        assert len(opt.plan.indices) == 6
        assert len(opt.plan.pairs) == 3


class TestDriverBehaviour:
    def test_zero_budget_returns_initial_row_only(self):
        oracle = CountedOracle(rosenbrock_objective())
        trace = ZosahOptimizer(oracle, np.array([-1.2, 1.0]), ZosahConfig(max_evals=0)).run()
        assert len(trace) == 1
        assert trace[0] == TraceRow(0, 1, pytest.approx(24.2))
        assert oracle.count == 1

    def test_budget_overshoot_is_bounded_by_one_step(self):
        oracle = CountedOracle(rosenbrock_objective())
        cfg = ZosahConfig(max_evals=100, seed=0, m=2, T=20)
        trace = ZosahOptimizer(oracle, np.array([-1.2, 1.0]), cfg).run()
        worst_step = 1 + 2 + 3 + 21  # value + probes + fresh samples + failed search
        assert trace[-1].cum_evals == oracle.count
        assert oracle.count <= 100 + worst_step
        assert trace[-2].cum_evals < 100

    def test_accepted_values_never_increase(self):
        for seed in range(5):
            trace = run_zosah(
                rosenbrock_objective(),
                np.array([-1.2, 1.0]),
                ZosahConfig(max_evals=800, seed=seed),
            )
            fs = [row.f_value for row in trace]
            assert all(b <= a for a, b in zip(fs, fs[1:]))
            cums = [row.cum_evals for row in trace]
            assert all(b > a for a, b in zip(cums, cums[1:]))
            assert [row.step for row in trace] == list(range(len(trace)))

    def test_newton_quality_first_step_on_sphere(self):
        oracle = CountedOracle(sphere(2))
        cfg = ZosahConfig(max_evals=10_000, seed=0, m=2)
        opt = ZosahOptimizer(oracle, np.array([0.8, -0.6]), cfg)
        f0 = oracle(opt.x)
        opt.trace.append(TraceRow(0, oracle.count, f0))
        row = opt.step()
        assert opt.stats[0].accepted
        assert row.f_value < 0.05 * f0

    def test_determinism_and_seed_sensitivity(self):
        cfg = ZosahConfig(max_evals=600, seed=7)
        a = run_zosah(rosenbrock_objective(), np.array([-1.2, 1.0]), cfg)
        b = run_zosah(rosenbrock_objective(), np.array([-1.2, 1.0]), cfg)
        assert a == b
        c = run_zosah(
            rosenbrock_objective(),
            np.array([-1.2, 1.0]),
            ZosahConfig(max_evals=600, seed=8),
        )
        assert [r.f_value for r in c] != [r.f_value for r in a]

    def test_run_zosah_matches_manual_driver(self):
        cfg = ZosahConfig(max_evals=300, seed=3)
        via_helper = run_zosah(rosenbrock_objective(), np.array([-1.2, 1.0]), cfg)
        oracle = CountedOracle(rosenbrock_objective())
        manual = ZosahOptimizer(oracle, np.array([-1.2, 1.0]), cfg).run()
        assert via_helper == manual

    def test_default_m_from_dimension(self):
        oracle = CountedOracle(sphere(30))
        opt = ZosahOptimizer(oracle, np.zeros(30), ZosahConfig(max_evals=10))
        assert opt.m == 20

    def test_dimension_and_shape_errors(self):
        with pytest.raises(ValueError, match="dimension >= 2"):
            ZosahOptimizer(CountedOracle(sphere(1)), np.zeros(1), ZosahConfig(max_evals=10))
        with pytest.raises(ValueError, match="m must be even"):
            ZosahOptimizer(
                CountedOracle(sphere(4)), np.zeros(4), ZosahConfig(max_evals=10, m=6)
            )
        with pytest.raises(DimensionMismatchError):
            ZosahOptimizer(CountedOracle(sphere(4)), np.zeros(3), ZosahConfig(max_evals=10))

    def test_hessian_failure_falls_back_to_scaled_gradient(self, monkeypatch):
        def always_fails(fit, gamma_floor):
            raise HessianUnavailableError("forced")

        monkeypatch.setattr(optimizer_mod, "solve_hessian", always_fails)
        oracle = CountedOracle(sphere(2))
        opt = ZosahOptimizer(oracle, np.array([1.0, 1.0]), ZosahConfig(max_evals=10_000, seed=0, m=2))
        f0 = oracle(opt.x)
        opt.trace.append(TraceRow(0, oracle.count, f0))
        row = opt.step()
        assert opt.stats[0].accepted
        assert row.f_value < f0


class TestDiagVariant:
    def test_off_diagonal_suppressed_before_pd_repair(self, monkeypatch):
        fitted = np.array([[2.0, 1.0], [1.0, 3.0]])
        seen = []
        real_newton = optimizer_mod.newton_direction

        def capture(A_bar, g_hat):
            seen.append(np.array(A_bar))
            return real_newton(A_bar, g_hat)

        monkeypatch.setattr(optimizer_mod, "solve_hessian", lambda fit, gamma_floor: fitted.copy())
        monkeypatch.setattr(optimizer_mod, "newton_direction", capture)

        for mode, expected in (("diag", np.diag([2.0, 3.0])), ("fit", make_pd(fitted, 0.1))):
            seen.clear()
            oracle = CountedOracle(sphere(2))
            opt = ZosahOptimizer(
                oracle, np.array([1.0, -1.0]),
                ZosahConfig(max_evals=10_000, seed=0, m=2, hessian_mode=mode),
            )
            oracle(opt.x)
            opt.step()
            assert len(seen) == 1
            np.testing.assert_allclose(seen[0], expected, atol=1e-12)

    def test_diag_tracks_fit_on_axis_aligned_quadratic(self):
        obj = quadratic_objective(np.diag([3.0, 1.0, 6.0, 0.5]))
        x0 = np.array([1.0, -2.0, 0.5, 1.5])
        traces = {}
        for mode in ("fit", "diag"):
            cfg = ZosahConfig(max_evals=400, seed=3, m=4, T=5, hessian_mode=mode)
            traces[mode] = run_zosah(obj, x0, cfg)
        f0 = traces["fit"][0].f_value
        assert traces["diag"][0].f_value == f0
        for a, b in zip(traces["fit"], traces["diag"]):
            assert abs(a.f_value - b.f_value) <= 0.05 * max(1.0, a.f_value)
        assert traces["fit"][-1].f_value <= 1e-4 * f0
        assert traces["diag"][-1].f_value <= 1e-4 * f0

    def test_diag_diverges_from_fit_on_rotated_quadratic(self):
        obj = quadratic_objective(ROTATED)
        x0 = np.array([1.0, -1.0])
        finals = {}
        for mode in ("fit", "diag"):
            cfg = ZosahConfig(max_evals=60, seed=0, m=2, eps=1e-5, hessian_mode=mode)
            finals[mode] = run_zosah(obj, x0, cfg)[-1].f_value
        # coupled fit solves the pair exactly; the diagonal variant cannot
        assert finals["fit"] < 1e-8
        assert finals["diag"] > 1e-6
