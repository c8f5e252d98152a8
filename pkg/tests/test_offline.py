"""Tests for the from-scratch per-timestep solver."""
import numpy as np
import pytest

from sattopo import (
    BodyKind,
    EdgeWeights,
    FeasibleSpec,
    ObjectiveParams,
    ValidationError,
    from_weights,
    is_feasible,
    kkt_residual,
    objective_value,
    solve_offline,
)

SAT = BodyKind.SATELLITE


def sat_spec(n, max_isl=4):
    return FeasibleSpec(n=n, kinds=(SAT,) * n, max_isl=max_isl)


def random_instance(rng, n, lam=None):
    """Well-conditioned synthetic problem: O(1) utilities, modest trace term."""
    p = from_weights(
        EdgeWeights(n=n, w=rng.integers(0, 2, size=n * (n - 1) // 2).astype(float))
    )
    u = rng.uniform(0.5, 1.5, size=(n, n))
    u = 0.5 * (u + u.T)
    np.fill_diagonal(u, 0.0)
    if lam is None:
        lam = float(rng.uniform(0.0, 1.0))
    return ObjectiveParams(p=p, u=u, kinds=(SAT,) * n, lambda_sat=lam, lambda_bs=lam)


class TestSolveOffline:
    def test_zero_data_stays_at_zero(self):
        n = 4
        params = ObjectiveParams(
            p=np.zeros((n, n)),
            u=np.zeros((n, n)),
            kinds=(SAT,) * n,
            lambda_sat=0.0,
            lambda_bs=0.0,
        )
        report = solve_offline(params, sat_spec(n))
        assert report.converged
        np.testing.assert_allclose(report.x_star, 0.0, atol=1e-8)

    def test_two_node_hand_optimum(self):
        # A single visible pair: the fit term pulls x_12 to -1 and the trace
        # term only pushes further, so the optimum is the saturated edge.
        p = np.array([[0.0, -1.0], [-1.0, 0.0]])
        u = np.array([[0.0, 1.0], [1.0, 0.0]])
        params = ObjectiveParams(
            p=p, u=u, kinds=(SAT, SAT), lambda_sat=1.0, lambda_bs=1.0
        )
        report = solve_offline(params, sat_spec(2))
        assert report.converged
        expected = np.array([[1.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_allclose(report.x_star, expected, atol=1e-6)

    @pytest.mark.parametrize("seed", range(10))
    def test_kkt_residual_small_on_random_instances(self, seed):
        rng = np.random.default_rng(400 + seed)
        n = int(rng.integers(3, 11))
        spec = sat_spec(n, max_isl=int(rng.integers(1, 4)))
        params = random_instance(rng, n)
        report = solve_offline(params, spec)
        assert report.converged
        assert is_feasible(report.x_star, spec)
        assert kkt_residual(report.x_star, params, spec) <= 1e-5

    def test_objective_not_worse_than_start(self):
        rng = np.random.default_rng(51)
        params = random_instance(rng, 6)
        spec = sat_spec(6)
        report = solve_offline(params, spec)
        assert report.objective <= objective_value(np.zeros((6, 6)), params) + 1e-12

    def test_scale_invariant_minimizer(self):
        # Utilities in 1/km rather than O(1) must not change the solution.
        rng = np.random.default_rng(53)
        params = random_instance(rng, 5, lam=0.1)
        tiny = ObjectiveParams(
            p=params.p,
            u=params.u * 1e-3,
            kinds=params.kinds,
            lambda_sat=params.lambda_sat * 1e-6,
            lambda_bs=params.lambda_bs * 1e-6,
        )
        spec = sat_spec(5)
        a = solve_offline(params, spec)
        b = solve_offline(tiny, spec)
        assert a.converged and b.converged
        np.testing.assert_allclose(a.x_star, b.x_star, atol=1e-4)

    @pytest.mark.parametrize("seed", range(10))
    def test_warm_start_independence(self, seed):
        rng = np.random.default_rng(500 + seed)
        n = 8
        spec = sat_spec(n)
        params = random_instance(rng, n)
        cold = solve_offline(params, spec)
        w = rng.uniform(0.0, 1.0, size=n * (n - 1) // 2)
        start = from_weights(EdgeWeights(n=n, w=w / max(1.0, w.sum() / 2)))
        warm = solve_offline(params, spec, warm_start=start)
        assert cold.converged and warm.converged
        assert warm.objective == pytest.approx(cold.objective, abs=1e-5)

    def test_invalid_tolerance_rejected(self):
        params = random_instance(np.random.default_rng(0), 3)
        with pytest.raises(ValidationError):
            solve_offline(params, sat_spec(3), tol=0.0)

    def test_report_fields(self):
        params = random_instance(np.random.default_rng(1), 4)
        report = solve_offline(params, sat_spec(4))
        d = report.to_dict()
        assert set(d) == {
            "objective",
            "iterations",
            "kkt_residual",
            "wall_time_s",
            "converged",
        }
        assert d["wall_time_s"] >= 0.0
        assert d["iterations"] >= 1
