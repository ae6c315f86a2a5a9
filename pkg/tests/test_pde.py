import numpy as np
import pytest

from kpplab.coeffs import Grid
from kpplab.pde import (
    BoundaryContamination,
    FrontTrace,
    KppNonlinearity,
    NoFront,
    NotPersistent,
    StabilityViolation,
    default_half_width,
    default_initial_profile,
    empirical_speeds,
    front_position,
    front_positions,
    local_convergence_check,
    periodic_steady_state,
    simulate_cauchy,
)

from conftest import B_TWO_MODE

R_FLIP = "2+2*sin(2*pi*x)"


class TestNonlinearity:
    def test_values(self):
        f = KppNonlinearity(2.0, 0.5)
        assert f(np.array([0.0]), np.array([0.0]))[0] == 0.0
        assert f(np.array([0.0]), np.array([4.0]))[0] == pytest.approx(0.0)

    def test_kpp_ratio_decreasing(self):
        f = KppNonlinearity("1 + sin(2*pi*x)")
        x = np.full(50, 0.3)
        u = np.linspace(0.01, 3, 50)
        assert np.all(np.diff(f(x, u) / u) < 0)

    def test_rejects_nonpositive_saturation(self):
        with pytest.raises(ValueError):
            KppNonlinearity(1.0, "cos(2*pi*x)")


class TestSteadyState:
    def test_logistic(self):
        p = periodic_steady_state(1.0, 0.0, n=64)
        np.testing.assert_allclose(p.p, 1.0, atol=1e-8)

    def test_variable_and_unique(self):
        first = periodic_steady_state(R_FLIP, B_TWO_MODE, n=512)
        assert first.residual <= 1e-8
        assert np.all(first.p > 0) and np.ptp(first.p) > 0.1
        second = periodic_steady_state(R_FLIP, B_TWO_MODE, n=512, start=10 * first.p)
        assert np.max(np.abs(first.p - second.p)) <= 1e-8

    def test_not_persistent(self):
        with pytest.raises(NotPersistent):
            periodic_steady_state(-1.0, 0.0, n=64)

    def test_interpolation_is_periodic(self):
        p = periodic_steady_state(R_FLIP, B_TWO_MODE, n=256)
        assert p(0.3) == pytest.approx(p(1.3)) == pytest.approx(p(-0.7))


class TestFrontTracking:
    def test_step_profile(self):
        x = np.linspace(-10, 10, 2001)
        u = (x <= 3.2).astype(float)
        h = x[1] - x[0]
        assert abs(front_position(x, u, 0.5, "plus") - 3.2) <= h
        assert front_position(x, u, 0.5, "minus") == x[0]

    def test_zero_profile(self):
        run = simulate_cauchy(1.0, 0.0, X=10, T=1.0, u0=np.zeros(639), n=640)
        assert np.all(run.snapshots == 0)
        trace = front_positions(run)
        assert np.all(trace.no_front)
        with pytest.raises(NoFront):
            empirical_speeds(run)

    def test_linear_trace(self):
        t = np.linspace(0, 10, 101)
        trace = FrontTrace(t, 3 * t + 1, -2 * t)
        cp, cm = empirical_speeds(trace)
        assert cp == pytest.approx(3.0, abs=1e-12)
        assert cm == pytest.approx(2.0, abs=1e-12)

    def test_window_validation(self):
        t = np.linspace(0, 1, 5)
        with pytest.raises(ValueError):
            empirical_speeds(FrontTrace(t, t, -t), window_fraction=0.0)

    def test_other_level_uses_snapshots(self, pde_run):
        run = pde_run("1", "0", 60.0)
        trace = front_positions(run, 0.25)
        assert trace.times.size == run.times.size
        # a lower level sits further out on a monotone front
        assert run.theta > 0.25
        assert trace.plus[-1] > run.front_plus[-1]
        assert trace.minus[-1] < run.front_minus[-1]


class TestCauchy:
    def test_default_profile(self):
        np.testing.assert_allclose(default_initial_profile([0.0, 1.25, 2.0, -1.25]), [1.0, 0.5, 0.0, 0.5])

    def test_default_half_width(self):
        assert default_half_width(4.0, 1.0, 10.0) == pytest.approx(20 + 10 * (2 + 1 + 4))

    def test_logistic_speed(self, pde_run):
        run = pde_run("1", "0", 60.0)
        cp, cm = empirical_speeds(run)
        assert cp == pytest.approx(2.0, abs=0.15)
        assert cm == pytest.approx(2.0, abs=0.15)

    def test_position_over_time(self, pde_run):
        run = pde_run("1", "0", 60.0)
        assert run.front_plus[-1] / run.trace_times[-1] == pytest.approx(2.0, rel=0.08)

    def test_constant_drift(self, pde_run):
        cp, cm = empirical_speeds(pde_run("4", "1", 60.0))
        assert cp == pytest.approx(5.0, rel=0.08)
        assert cm == pytest.approx(3.0, rel=0.08)

    def test_flip_fronts_ordered(self, pde_run):
        plus = pde_run(R_FLIP, B_TWO_MODE, 8.0)
        minus = pde_run(R_FLIP, f"-({B_TWO_MODE})", 8.0)
        assert plus.front_plus[-1] > minus.front_plus[-1] + 0.5

    @pytest.mark.parametrize("key", ["flip_plus", "mirror_pair"])
    def test_zero_mean_symmetric_speeds(self, pde_run, key):
        from conftest import PDE_CORPUS

        cp, cm = empirical_speeds(pde_run(*PDE_CORPUS[key], 60.0))
        assert abs(cp - cm) <= 0.1

    def test_invariants(self, pde_run):
        run = pde_run(R_FLIP, B_TWO_MODE, 8.0)
        assert run.min_value >= -1e-12
        assert run.max_value <= max(run.u0_max, run.ceiling) + 1e-6
        assert np.all(run.snapshots >= 0)

    def test_comparison_principle(self):
        X = default_half_width(R_FLIP, B_TWO_MODE, 4.0)
        kw = dict(X=X, T=4.0, n=2048)
        x = Grid(2048, -X, X, "dirichlet").x
        u0 = 0.5 * default_initial_profile(x)
        v0 = default_initial_profile(x) + 0.2 * default_initial_profile(x / 2)
        u = simulate_cauchy(R_FLIP, B_TWO_MODE, u0=u0, **kw)
        v = simulate_cauchy(R_FLIP, B_TWO_MODE, u0=v0, **kw)
        assert np.all(u.snapshots <= v.snapshots + 1e-10)

    def test_retreating_front(self):
        run = simulate_cauchy(0.25, -2.0, T=30.0)
        late = run.trace_times >= 15.0
        assert np.all(np.diff(run.front_plus[late]) <= 1e-12)
        cp, cm = empirical_speeds(run)
        assert cp < 0 < cm

    def test_explicit_stability(self):
        with pytest.raises(StabilityViolation):
            simulate_cauchy(1.0, 0.0, X=10, T=1.0, implicit=False, dt=0.01)

    def test_explicit_path_agrees(self):
        kw = dict(X=15.0, T=0.5, n=256)
        implicit = simulate_cauchy(1.0, 0.5, dt=1e-4, **kw)
        explicit = simulate_cauchy(1.0, 0.5, dt=1e-4, implicit=False, **kw)
        assert np.max(np.abs(implicit.final - explicit.final)) <= 1e-4

    def test_boundary_guard(self):
        with pytest.raises(BoundaryContamination) as info:
            simulate_cauchy(1.0, 0.0, X=5.0, T=10.0)
        assert info.value.side in ("left", "right")

    def test_bad_initial_profile(self):
        with pytest.raises(ValueError):
            simulate_cauchy(1.0, 0.0, X=5.0, T=1.0, n=100, u0=-np.ones(99))


class TestLocalConvergence:
    def test_logistic(self, pde_run):
        run = pde_run("1", "0", 60.0)
        trace = local_convergence_check(run, periodic_steady_state(1.0, 0.0, n=64))
        assert trace.deviation[np.searchsorted(trace.times, 30.0)] < 0.01

    def test_sufficient_condition_case(self):
        # 4 * mean(r) = 4 > mean(b^2) = 1/2
        r, b = "1 + 0.5*sin(2*pi*x)", "cos(2*pi*x)"
        run = simulate_cauchy(r, b, T=30.0)
        trace = local_convergence_check(run, periodic_steady_state(r, b, n=512))
        assert trace.decreasing
        assert trace.deviation[-1] < 0.05

    def test_extinction_branch(self):
        run = simulate_cauchy(-1.0, 0.0, T=10.0)
        with pytest.raises(NotPersistent):
            periodic_steady_state(-1.0, 0.0, n=64)
        trace = local_convergence_check(run, None)
        assert trace.extinct and trace.decreasing
        assert trace.deviation[-1] < 1e-3
