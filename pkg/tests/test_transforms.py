import math

import numpy as np
import pytest

from kpplab.coeffs import Grid, as_coefficient
from kpplab.eigen import principal_eigenpair_periodic, principal_eigenvalue
from kpplab.speeds import spreading_speed
from kpplab.transforms import (
    ConditionViolated,
    NonZeroMeanAdvection,
    SymmetryViolated,
    check_even_symmetry,
    construct_mirror_eigenfunction,
    liouville_reduce,
    nadin_check,
    sign_once_check,
    zero_mean_mirror,
)

B_TWO_MODE = "cos(2*pi*x)+sin(4*pi*x)"


def random_zero_mean(rng, modes=3, scale=1.0):
    """Random trigonometric polynomial without a constant term."""
    terms = []
    for k in range(1, modes + 1):
        a, c = rng.normal(scale=scale / k, size=2)
        terms.append(f"{a:.6f}*cos({2 * k}*pi*x) + {c:.6f}*sin({2 * k}*pi*x)")
    return " + ".join(terms)


class TestLiouville:
    def test_no_advection(self):
        g = Grid(128)
        np.testing.assert_array_equal(liouville_reduce("1 + sin(2*pi*x)", 0.0, g), as_coefficient("1 + sin(2*pi*x)")(g.x))

    def test_construction_gives_constant(self):
        g = Grid(1024)
        r = "cos(2*pi*x)^2/4 - pi*sin(2*pi*x) + 1"
        np.testing.assert_allclose(liouville_reduce(r, "cos(2*pi*x)", g), 1.0, atol=1e-6)

    def test_rejects_mean(self):
        with pytest.raises(NonZeroMeanAdvection) as info:
            liouville_reduce(1.0, "0.5 + cos(2*pi*x)", Grid(64))
        assert info.value.mean_value == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_identity_on_random_corpus(self, seed):
        rng = np.random.default_rng(seed)
        b = random_zero_mean(rng)
        r = "1 + " + random_zero_mean(rng)
        n = 1024
        reduced = liouville_reduce(r, b, Grid(n))
        for lam in (-2.0, -1.0, 0.0, 1.0, 2.0):
            k_adv = principal_eigenvalue(r, b, lam, n)
            k_red = principal_eigenvalue(reduced, 0.0, lam, n)
            assert abs(k_adv - k_red) <= 1e-4


class TestSignOnce:
    def test_constant(self):
        rep = sign_once_check(np.ones(32), 1.0)
        assert rep.sign_changes == 0 and rep.constant_sign and rep.min_value > 0

    def test_two_mode_eigenfunction(self):
        res = principal_eigenpair_periodic(B_TWO_MODE, B_TWO_MODE, 0.0, 2048)
        rep = sign_once_check(res.eigenfunction, 1.0, res.grid.h)
        assert rep.sign_changes == 0 and rep.constant_sign

    def test_gamma_zero_rejected(self):
        with pytest.raises(ValueError):
            sign_once_check(np.ones(8), 0.0)

    def test_counts_changes(self):
        x = np.arange(64) / 64
        rep = sign_once_check(np.sin(2 * np.pi * x) + 2, 0.01, 1 / 64)
        assert rep.sign_changes == 2 and not rep.constant_sign


class TestMirror:
    def test_reference_pair(self):
        m = construct_mirror_eigenfunction("2 + " + B_TWO_MODE, B_TWO_MODE, 2.0, 1.0, 2048)
        assert m.residual <= 1e-4
        assert m.eigenvalue == pytest.approx(2.016, abs=5e-3)
        assert m.phi_minus[0] == pytest.approx(1.0)
        assert m.closure <= 1e-12
        assert np.all(m.phi_minus > 0)

    def test_matches_direct_eigenfunction(self):
        r = "2 + " + B_TWO_MODE
        m = construct_mirror_eigenfunction(r, B_TWO_MODE, 2.0, 1.0, 2048)
        direct = principal_eigenpair_periodic(r, "-(" + B_TWO_MODE + ")", 0.0, 2048)
        psi = direct.eigenfunction / direct.eigenfunction[0]
        assert np.max(np.abs(psi - m.phi_minus)) <= 1e-4
        assert direct.eigenvalue == pytest.approx(m.eigenvalue, abs=1e-6)

    def test_nonzero_mean_advection(self):
        b = "0.4 + cos(2*pi*x)"
        r = "1 - 0.5*(0.4 + cos(2*pi*x))"
        m = construct_mirror_eigenfunction(r, b, 1.0, -0.5, 2048)
        direct = principal_eigenpair_periodic(r, "-(0.4 + cos(2*pi*x))", 0.0, 2048)
        psi = direct.eigenfunction / direct.eigenfunction[0]
        assert m.residual <= 1e-4
        assert np.max(np.abs(psi - m.phi_minus)) <= 1e-4

    def test_degenerate_gamma(self):
        m = construct_mirror_eigenfunction(3.0, 0.0, 3.0, 0.0, 64)
        np.testing.assert_array_equal(m.phi_minus, 1.0)
        assert m.residual == 0.0 and m.eigenvalue == 3.0

    def test_condition_violated(self):
        with pytest.raises(ConditionViolated):
            construct_mirror_eigenfunction("2 + 2*sin(2*pi*x)", B_TWO_MODE, 2.0, 1.0, 256)

    def test_zero_mean_formula(self):
        # two formulas for the same function; both use O(h^2) quadrature
        n = 4096
        m = construct_mirror_eigenfunction("2 + " + B_TWO_MODE, B_TWO_MODE, 2.0, 1.0, n)
        other = zero_mean_mirror(m.phi_plus, B_TWO_MODE, 1.0, Grid(n))
        assert np.max(np.abs(other - m.phi_minus)) <= 1e-6

    def test_rows(self):
        m = construct_mirror_eigenfunction("2 + " + B_TWO_MODE, B_TWO_MODE, 2.0, 1.0, 256)
        rows = m.rows()
        assert len(rows) == 256 and len(rows[0]) == 5

    @pytest.mark.parametrize("lam", [-1.0, -0.5, 0.0, 0.5, 1.0])
    def test_lambda_identity(self, lam):
        b = "0.3 + cos(2*pi*x) - 0.5*sin(4*pi*x)"
        r = as_coefficient(1.0) + 0.7 * as_coefficient(b)
        k_plus = principal_eigenvalue(r, b, lam, 1024)
        k_minus = principal_eigenvalue(r, -as_coefficient(b), -lam, 1024)
        assert abs(k_plus - k_minus) <= 1e-5

    def test_speed_identity(self):
        b = as_coefficient("0.3 + cos(2*pi*x) - 0.5*sin(4*pi*x)")
        r = 1.0 + 0.7 * b
        c_plus = spreading_speed(r, b, "right", n=512).value
        c_minus = spreading_speed(r, -b, "left", n=512).value
        assert abs(c_plus - c_minus) <= 1e-3


class TestSymmetry:
    def test_even_pair(self):
        rep = check_even_symmetry("1 + cos(2*pi*x)", "cos(2*pi*x)", 0.0, n=1024)
        assert rep.passed
        assert max(rep.gaps) <= 1e-8
        assert rep.lambdas == [-1.0, -0.5, 0.0, 0.5, 1.0]

    def test_odd_advection_rejected(self):
        with pytest.raises(SymmetryViolated) as info:
            check_even_symmetry(1.0, "sin(2*pi*x)", 0.0, n=64)
        assert info.value.which == "b"

    def test_shifted_centre(self):
        rep = check_even_symmetry("1 + cos(2*pi*(x - 0.25))", "sin(2*pi*x)", 0.5, lambdas=(0.0, 0.8), n=512)
        assert rep.passed

    def test_lambda_zero_any_pair(self):
        k_plus = principal_eigenvalue("1 + cos(2*pi*x)", "cos(2*pi*x)", 0.0, 512)
        k_minus = principal_eigenvalue("1 + cos(2*pi*x)", "-cos(2*pi*x)", 0.0, 512)
        assert abs(k_plus - k_minus) <= 1e-8


class TestNadin:
    def test_constant(self):
        k_direct, k_via, variation = nadin_check(2.0, 0.5, n=256)
        assert variation <= 1e-8
        assert k_direct == pytest.approx(2.25, abs=1e-10)
        assert k_via == pytest.approx(2.25, abs=1e-10)

    def test_variable(self):
        res = nadin_check("1 + sin(2*pi*x)", 0.5, n=1024)
        assert abs(res.k_direct - res.k_via_minimizer) <= 1e-4
        assert res.mu_variation > 1e-3

    def test_strict_inequality(self):
        res = nadin_check("1 + sin(2*pi*x)", 0.5, n=1024)
        k0 = principal_eigenvalue("1 + sin(2*pi*x)", 0.0, 0.0, 1024)
        assert res.k_direct < k0 + 0.25 - 1e-4
