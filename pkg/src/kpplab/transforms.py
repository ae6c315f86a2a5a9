"""Structural identities between eigenproblems.

* Liouville reduction of a zero-mean advection to a potential.
* Explicit construction of the principal eigenfunction of L_0[r; -b] from the
  one of L_0[r; b] when r = beta + gamma * b.
* Reflection symmetry k_lam[r; b] = k_{-lam}[r; -b] for even coefficients.
* The variational minimiser mu = log(phi / psi) / 2 for zero advection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .coeffs import Grid, as_coefficient, derivative_samples, periodic_derivative, sample
from .eigen import assemble_periodic, coefficient_period, principal_eigenpair_periodic, principal_eigenvalue

__all__ = [
    "NonZeroMeanAdvection",
    "ConditionViolated",
    "SignChange",
    "DegenerateH",
    "SymmetryViolated",
    "MirrorConstruction",
    "SignReport",
    "SymmetryReport",
    "NadinResult",
    "liouville_reduce",
    "construct_mirror_eigenfunction",
    "zero_mean_mirror",
    "check_even_symmetry",
    "nadin_check",
    "sign_once_check",
]


class NonZeroMeanAdvection(ValueError):
    def __init__(self, mean_value: float):
        super().__init__(f"advection has mean {mean_value:.3e}; the reduction needs a zero-mean b")
        self.mean_value = mean_value


class ConditionViolated(ValueError):
    """r is not of the form beta + gamma * b."""


class SignChange(RuntimeError):
    """phi' + gamma * phi changes sign; usually the grid is too coarse."""


class DegenerateH(ArithmeticError):
    pass


class SymmetryViolated(ValueError):
    def __init__(self, which: str, node: int, x: float, gap: float):
        super().__init__(f"{which} is not even about x0: node {node} (x={x:.6g}) differs by {gap:.3e}")
        self.which, self.node, self.x, self.gap = which, node, x, gap


@dataclass
class MirrorConstruction:
    x: np.ndarray
    phi_plus: np.ndarray
    g: np.ndarray
    h: np.ndarray
    C: float
    phi_minus: np.ndarray
    residual: float
    gamma: float
    beta: float
    eigenvalue: float
    closure: float = 0.0

    def rows(self):
        """(x, phi_plus, phi_minus, g, h) rows for CSV export."""
        return list(zip(self.x, self.phi_plus, self.phi_minus, self.g, self.h))


@dataclass
class SignReport:
    sign_changes: int
    min_value: float
    max_value: float

    @property
    def constant_sign(self) -> bool:
        return self.sign_changes == 0 and (self.min_value > 0 or self.max_value < 0)


@dataclass
class SymmetryReport:
    x0: float
    lambdas: list
    gaps: list
    tol: float = 1e-6
    values: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(gap <= self.tol for gap in self.gaps)


@dataclass
class NadinResult:
    k_direct: float
    k_via_minimizer: float
    mu_variation: float

    def __iter__(self):
        return iter((self.k_direct, self.k_via_minimizer, self.mu_variation))


def _mean_of(b, grid: Grid) -> float:
    return float(np.mean(sample(b, grid)))


def liouville_reduce(r, b, grid: Grid) -> np.ndarray:
    """Samples of r - b^2/4 - b'/2; k_lam[r; b] equals k_lam of this potential with b = 0."""
    b_mean = _mean_of(b, grid)
    if abs(b_mean) > 1e-10:
        raise NonZeroMeanAdvection(b_mean)
    r_vals = sample(r, grid)
    b_vals = sample(b, grid)
    if isinstance(b, np.ndarray):
        db = periodic_derivative(b_vals, grid.h)
    else:
        db = derivative_samples(b, grid)
    return r_vals - 0.25 * b_vals**2 - 0.5 * db


def _count_sign_changes(values: np.ndarray) -> int:
    s = np.sign(values)
    s = s[s != 0]
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s != np.roll(s, 1)))


def sign_once_check(phi, gamma: float, h: float | None = None) -> SignReport:
    """Sign changes of the discrete phi' + gamma*phi over one period."""
    if gamma == 0:
        raise ValueError("gamma = 0 is excluded: phi' alone vanishes somewhere on a period")
    phi = np.asarray(phi, dtype=float)
    if h is None:
        h = 1.0 / phi.size
    m = periodic_derivative(phi, h) + gamma * phi
    return SignReport(_count_sign_changes(m), float(m.min()), float(m.max()))


def _closed_cumtrapz(values: np.ndarray, h: float) -> np.ndarray:
    return cumulative_trapezoid(np.append(values, values[0]), dx=h, initial=0.0)


def construct_mirror_eigenfunction(
    r, b, beta: float, gamma: float, n: int = 2048, tol: float = 1e-10, *, period=None
) -> MirrorConstruction:
    """Build phi_minus = e^g (1 + C h), the principal eigenfunction of L_0[r; -b].

    Requires r = beta + gamma * b.  phi_plus solves L_0[gamma b; b]; the
    returned eigenvalue already includes beta.
    """
    if period is None:
        period = coefficient_period(r, b)
    grid = Grid(int(n), 0.0, float(period))
    r_vals, b_vals = sample(r, grid), sample(b, grid)
    mismatch = float(np.max(np.abs(r_vals - beta - gamma * b_vals)))
    if mismatch > 1e-8:
        raise ConditionViolated(f"sup|r - beta - gamma*b| = {mismatch:.3e} exceeds 1e-8")

    if gamma == 0:
        # r is the constant beta; both eigenfunctions are constant
        ones = np.ones(grid.n)
        return MirrorConstruction(
            grid.x, ones, np.zeros(grid.n), grid.x.copy(), 0.0, ones, 0.0, 0.0, float(beta), float(beta)
        )

    shifted = gamma * b_vals
    plus = principal_eigenpair_periodic(shifted, b_vals, 0.0, grid.n, tol, period=period)
    phi = plus.eigenfunction / plus.eigenfunction[0]
    k = plus.eigenvalue
    dphi = periodic_derivative(phi, grid.h)
    m = dphi + gamma * phi
    if _count_sign_changes(m) or np.any(m == 0):
        raise SignChange("phi' + gamma*phi vanishes on the grid")

    g_closed = _closed_cumtrapz((gamma * dphi + k * phi) / m, grid.h)
    # e^{-g} is not periodic, so the integrand is evaluated on the closed cell
    h_closed = cumulative_trapezoid(np.exp(-g_closed) / np.append(m, m[0]), dx=grid.h, initial=0.0)
    h_end = h_closed[-1]
    if abs(h_end) < 1e-14:
        raise DegenerateH(f"h(period) = {h_end:.3e}")
    C = (np.exp(-g_closed[-1]) - 1.0) / h_end
    phi_minus_closed = np.exp(g_closed) * (1.0 + C * h_closed)
    phi_minus = phi_minus_closed[:-1]
    if np.any(phi_minus <= 0):
        raise SignChange("constructed phi_minus is not positive")

    op = assemble_periodic(shifted, -b_vals, 0.0, grid)
    residual = float(np.max(np.abs(op.matvec(phi_minus) - k * phi_minus)))
    return MirrorConstruction(
        x=grid.x,
        phi_plus=phi,
        g=g_closed[:-1],
        h=h_closed[:-1],
        C=float(C),
        phi_minus=phi_minus,
        residual=residual,
        gamma=float(gamma),
        beta=float(beta),
        eigenvalue=float(k + beta),
        closure=float(abs(phi_minus_closed[-1] - 1.0)),
    )


def zero_mean_mirror(phi_plus, b, gamma: float, grid: Grid) -> np.ndarray:
    """(phi_plus' + gamma phi_plus) * exp(int_0^x b), scaled to 1 at node 0."""
    phi_plus = np.asarray(phi_plus, dtype=float)
    b_vals = sample(b, grid)
    B = cumulative_trapezoid(b_vals, dx=grid.h, initial=0.0)
    out = (periodic_derivative(phi_plus, grid.h) + gamma * phi_plus) * np.exp(B)
    return out / out[0]


def check_even_symmetry(r, b, x0: float = 0.0, lambdas=(-1.0, -0.5, 0.0, 0.5, 1.0), n: int = 1024, tol: float = 1e-10):
    """|k_lam[r; b] - k_{-lam}[r; -b]| for coefficients even about x0."""
    period = coefficient_period(r, b)
    grid = Grid(int(n), 0.0, float(period))
    for name, c in (("r", r), ("b", b)):
        coef = as_coefficient(c)
        diff = np.abs(coef(grid.x) - coef(x0 - grid.x))
        i = int(np.argmax(diff))
        if diff[i] > 1e-10:
            raise SymmetryViolated(name, i, float(grid.x[i]), float(diff[i]))
    neg_b = -as_coefficient(b)
    lambdas = [float(lam) for lam in lambdas]
    gaps, values = [], []
    for lam in lambdas:
        k_plus = principal_eigenvalue(r, b, lam, n, tol, period=period)
        k_minus = principal_eigenvalue(r, neg_b, -lam, n, tol, period=period)
        values.append((k_plus, k_minus))
        gaps.append(abs(k_plus - k_minus))
    return SymmetryReport(x0, lambdas, gaps, values=values)


def nadin_check(r_tilde, lam: float, n: int = 1024, tol: float = 1e-10) -> NadinResult:
    """k_lam[r; 0] directly and through the minimiser mu = log(phi/psi)/2.

    phi and psi are the principal eigenfunctions for +lam and -lam.  The
    second value is k_0 of the potential r + lam^2 + mu'^2 + 2 lam mu'.
    """
    period = coefficient_period(r_tilde)
    grid = Grid(int(n), 0.0, float(period))
    forward = principal_eigenpair_periodic(r_tilde, 0.0, lam, n, tol, period=period, refine=False)
    backward = principal_eigenpair_periodic(r_tilde, 0.0, -lam, n, tol, period=period, refine=False)
    mu = 0.5 * np.log(forward.eigenfunction / backward.eigenfunction)
    dmu = periodic_derivative(mu, grid.h)
    potential = sample(r_tilde, grid) + lam**2 + dmu**2 + 2.0 * lam * dmu
    k_via = principal_eigenvalue(potential, 0.0, 0.0, n, tol, period=period)
    return NadinResult(forward.eigenvalue, k_via, float(mu.max() - mu.min()))
