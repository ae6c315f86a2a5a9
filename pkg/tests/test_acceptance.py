"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n PASS|FAIL`` line (visible without
``-s``) and fails if the numbers or the runtime budget are not met.
"""

import math
import time

import numpy as np
import pytest

from kpplab.coeffs import as_coefficient
from kpplab.eigen import (
    monodromy_oracle,
    principal_eigenpair_periodic,
    principal_eigenvalue,
    richardson_eigenvalue,
    zero_order_bounds,
)
from kpplab.pde import empirical_speeds
from kpplab.scenarios import (
    growth_with_eigenvalue,
    run_bounded_domain_suite,
    run_period_scaling_suite,
    run_persistence_condition_suite,
    run_persistence_vs_speed_suite,
)
from kpplab.speeds import spreading_speed
from kpplab.transforms import construct_mirror_eigenfunction

from conftest import B_TWO_MODE, PDE_CORPUS

N = 1024
TOL = 1e-10


@pytest.fixture
def announce(capsys):
    def emit(number, title, ok, elapsed, limit, detail=""):
        flag = "PASS" if ok and elapsed < limit else "FAIL"
        with capsys.disabled():
            print(f"\nCRITERION {number:2d} {flag} {title} [{elapsed:.1f}s / {limit:g}s] {detail}".rstrip())

    return emit


def _k0(r, b):
    return richardson_eigenvalue(r, b, 0.0, N, TOL)


def _c(r, b, direction="right"):
    return spreading_speed(r, b, direction, n=N, eig_tol=TOL).value


def test_criterion_01_advection_flip(announce):
    start = time.perf_counter()
    b = as_coefficient(B_TWO_MODE)
    r = b + 2.0
    k = [_k0(r, b), _k0(r, -b)]
    c = [_c(r, b), _c(r, -b)]
    elapsed = time.perf_counter() - start
    ok = all(abs(v - 2.016) <= 5e-3 for v in k) and all(abs(v - 2.819) <= 5e-3 for v in c)
    announce(1, "advection flip leaves k0 and c+ unchanged", ok, elapsed, 10, f"k0={k} c+={c}")
    assert ok and elapsed < 10


def test_criterion_02_flip_asymmetry(announce):
    start = time.perf_counter()
    b = as_coefficient(B_TWO_MODE)
    r = "2+2*sin(2*pi*x)"
    got = {"k0[r;b]": _k0(r, b), "k0[r;-b]": _k0(r, -b), "c+[r;b]": _c(r, b), "c+[r;-b]": _c(r, -b)}
    want = {"k0[r;b]": 2.221, "k0[r;-b]": 1.892, "c+[r;b]": 2.933, "c+[r;-b]": 2.745}
    elapsed = time.perf_counter() - start
    ok = all(abs(got[key] - want[key]) <= 5e-3 for key in want)
    announce(2, "flip changes k0 and c+ for generic r", ok, elapsed, 10, str(got))
    assert ok and elapsed < 10


def test_criterion_03_constant_closed_forms(announce):
    rng = np.random.default_rng(20240603)
    pairs = list(zip(rng.uniform(0.1, 5.0, 20), rng.uniform(-3.0, 3.0, 20)))
    start = time.perf_counter()
    errors = []
    for r0, b0 in pairs:
        # constants are exact on any grid, so a small one without extrapolation suffices
        cp = spreading_speed(r0, b0, "right", n=16, richardson=False).value
        cm = spreading_speed(r0, b0, "left", n=16, richardson=False).value
        errors.append(max(abs(cp - (b0 + 2 * math.sqrt(r0))), abs(cm - (-b0 + 2 * math.sqrt(r0)))))
    elapsed = time.perf_counter() - start
    ok = max(errors) <= 1e-6
    announce(3, "constant coefficients give b0 +- 2 sqrt(r0)", ok, elapsed, 5, f"max error {max(errors):.2e}")
    assert ok and elapsed < 5


MIRROR_ADVECTIONS = (
    B_TWO_MODE,
    "cos(2*pi*x)",
    "sin(2*pi*x)-0.5*cos(4*pi*x)",
    "0.4+cos(2*pi*x)",
    "0.6*sin(2*pi*x)+0.3*cos(6*pi*x)",
)
MIRROR_CORPUS = [(b, beta, gamma) for b in MIRROR_ADVECTIONS for beta, gamma in ((2.0, 1.0), (0.5, -0.5))]


def test_criterion_04_mirror_construction(announce):
    assert len(MIRROR_CORPUS) == 10
    start = time.perf_counter()
    residual = match = lam_gap = 0.0
    for b_expr, beta, gamma in MIRROR_CORPUS:
        b = as_coefficient(b_expr)
        r = beta + gamma * b
        m = construct_mirror_eigenfunction(r, b, beta, gamma, 2048)
        direct = principal_eigenpair_periodic(r, -b, 0.0, 2048)
        psi = direct.eigenfunction / direct.eigenfunction[0]
        residual = max(residual, m.residual)
        match = max(match, float(np.max(np.abs(psi - m.phi_minus))))
        for lam in (-1.0, -0.5, 0.5, 1.0):
            gap = abs(principal_eigenvalue(r, b, lam, N, TOL) - principal_eigenvalue(r, -b, -lam, N, TOL))
            lam_gap = max(lam_gap, gap)
    elapsed = time.perf_counter() - start
    ok = residual <= 1e-4 and match <= 1e-4 and lam_gap <= 1e-5
    detail = f"residual {residual:.1e}, eigenfunction gap {match:.1e}, lambda gap {lam_gap:.1e}"
    announce(4, "mirror eigenfunction for r = beta + gamma b", ok, elapsed, 30, detail)
    assert ok and elapsed < 30


def test_criterion_05_growth_from_advection(announce):
    start = time.perf_counter()
    rows = []
    for b_expr in (B_TWO_MODE, "cos(2*pi*x)"):
        b = as_coefficient(b_expr)
        r = growth_with_eigenvalue(b, 1.0)
        rows.append((_k0(r, b), _k0(r, -b), _c(r, b), _c(r, -b, "left")))
    elapsed = time.perf_counter() - start
    ok = all(abs(kp - 1.0) <= 1e-3 and km > 1.0 + 1e-3 and cp < cm - 1e-3 for kp, km, cp, cm in rows)
    announce(5, "r = b^2/4 + b'/2 + 1 gives k0 = 1 and a slower flip", ok, elapsed, 10, str(rows))
    assert ok and elapsed < 10


@pytest.mark.slow
def test_criterion_06_period_scaling(announce):
    start = time.perf_counter()
    rep = run_period_scaling_suite(n=N, tol=TOL)
    elapsed = time.perf_counter() - start
    failed = [line for line in rep.summary_lines() if line.startswith("[FAIL]")]
    announce(6, "small and large period limits", rep.passed, elapsed, 60, "; ".join(failed))
    passed = rep.passed
    assert passed, "\n".join(rep.summary_lines())
    assert elapsed < 60


def test_criterion_07_dirichlet_shift(announce):
    start = time.perf_counter()
    rep = run_bounded_domain_suite(n=N, tol=TOL)
    elapsed = time.perf_counter() - start
    shifts = [c.measured["shift"] for c in rep.cases]
    announce(7, "Dirichlet shift by -1 on [-1, 1] with b = x", rep.passed, elapsed, 5, f"shifts {shifts}")
    passed = rep.passed
    assert passed, "\n".join(rep.summary_lines())
    assert len(rep.cases) == 4 and elapsed < 5


@pytest.mark.slow
def test_criterion_08_persistence_vs_speed(announce):
    start = time.perf_counter()
    rep = run_persistence_vs_speed_suite(M=1.0, n=N, tol=TOL)
    elapsed = time.perf_counter() - start
    a_star = rep.case("tent: some A gives c+ < 1/M").measured
    bound = rep.case("non-constant r: 0 < c+ < 2 sqrt(k0)").measured
    detail = f"A*={a_star['A*']:g} k0={a_star['k0']:.4f} c+={a_star['c+']:.4f}; bound margin {bound['min margin']:.3e}"
    announce(8, "persistence without fast spreading", rep.passed, elapsed, 60, detail)
    passed = rep.passed
    assert passed, "\n".join(rep.summary_lines())
    assert bound["count"] == 10 and elapsed < 60


def test_criterion_09_dirichlet_limit(announce):
    start = time.perf_counter()
    rep = run_persistence_condition_suite(R_grid=(1.0, 2.0, 4.0, 8.0, 16.0), n=N, tol=TOL)
    elapsed = time.perf_counter() - start
    limit = rep.cases[3].measured
    announce(9, "Dirichlet eigenvalues on [-R, R] approach the reduced value", rep.passed, elapsed, 20, str(limit))
    passed = rep.passed
    assert passed, "\n".join(rep.summary_lines())
    assert elapsed < 20


ZERO_MEAN = ("logistic", "flip_plus", "flip_minus", "mirror_pair")


@pytest.mark.slow
def test_criterion_10_pde_consistency(announce, pde_run):
    start = time.perf_counter()
    lines, ok = [], True
    for key, (r, b) in PDE_CORPUS.items():
        run = pde_run(r, b, 60.0)
        cp_hat, cm_hat = empirical_speeds(run)
        cp, cm = _c(r, b), _c(r, b, "left")
        for got, want in ((cp_hat, cp), (cm_hat, cm)):
            ok &= abs(got - want) <= max(0.08 * abs(want), 0.1)
        ok &= run.min_value >= 0.0 and run.max_value <= max(run.u0_max, run.ceiling) + 1e-6
        if key in ZERO_MEAN:
            ok &= abs(cp_hat - cm_hat) <= 0.1
        lines.append(f"{key}: c+ {cp_hat:.3f}/{cp:.3f} c- {cm_hat:.3f}/{cm:.3f}")
    elapsed = time.perf_counter() - start
    announce(10, "empirical fronts match the spreading speeds", ok, elapsed, 300, "; ".join(lines))
    assert ok and elapsed < 300


ORACLE_PAIRS = (
    ("1+sin(2*pi*x)", "0"),
    ("2+cos(2*pi*x)+sin(4*pi*x)", B_TWO_MODE),
    ("2+2*sin(2*pi*x)", B_TWO_MODE),
    ("0.5*cos(2*pi*x)^2-1", "0.3+sin(2*pi*x)"),
    ("3*sin(4*pi*x)", "2*cos(2*pi*x)"),
    ("1", "0.5+0.5*cos(2*pi*x)"),
    ("exp(sin(2*pi*x))", "-cos(4*pi*x)"),
    ("4*cos(2*pi*x)^3", "0"),
    ("-1+sin(6*pi*x)", "1.5*sin(2*pi*x)"),
    ("0.2+abs(sin(2*pi*x))", "0.8*cos(2*pi*x)-0.3"),
)
ORACLE_LAMBDAS = (-1.0, 0.0, 1.0)


def test_criterion_11_oracle_cross_validation(announce):
    start = time.perf_counter()
    worst, convex, bounded = 0.0, True, True
    lam_grid = np.linspace(-1.5, 1.5, 13)
    for r, b in ORACLE_PAIRS:
        for lam in ORACLE_LAMBDAS:
            k = richardson_eigenvalue(r, b, lam, 512, TOL)
            worst = max(worst, abs(k - monodromy_oracle(r, b, lam, 2048)))
        ks = np.array([principal_eigenvalue(r, b, lam, 512, TOL) for lam in lam_grid])
        convex &= bool(np.min(ks[:-2] + ks[2:] - 2 * ks[1:-1]) >= -1e-8)
        for lam, k in zip(lam_grid, ks):
            lo, hi = zero_order_bounds(r, b, lam, 512)
            bounded &= lo - 1e-9 <= k <= hi + 1e-9
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and convex and bounded
    detail = f"{len(ORACLE_PAIRS) * len(ORACLE_LAMBDAS)} problems, max gap {worst:.1e}, convex={convex}, bounded={bounded}"
    announce(11, "grid solver agrees with Floquet shooting", ok, elapsed, 60, detail)
    assert ok and elapsed < 60
