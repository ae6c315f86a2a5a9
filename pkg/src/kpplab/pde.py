"""Fisher-KPP time stepping.

    u_t = u_xx - (b u)_x + u (r - gamma u)

Space: conservative central differences, the flux at x_{i+1/2} being
(u_{i+1} - u_i)/h - b_{i+1/2} (u_i + u_{i+1})/2.  Time: Strang splitting of
an implicit (backward Euler) transport step and the exact logistic flow of
the reaction, which keeps u >= 0 unconditionally and never overshoots r/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu, spsolve

from .coeffs import Constant, Grid, as_coefficient, derivative_samples, sample
from .eigen import NoConvergence, coefficient_period, principal_eigenvalue

__all__ = [
    "NotPersistent",
    "StabilityViolation",
    "BoundaryContamination",
    "NoFront",
    "KppNonlinearity",
    "SteadyState",
    "SimulationRun",
    "FrontTrace",
    "ConvergenceTrace",
    "default_initial_profile",
    "default_half_width",
    "periodic_steady_state",
    "simulate_cauchy",
    "front_positions",
    "front_position",
    "empirical_speeds",
    "local_convergence_check",
]


class NotPersistent(ValueError):
    def __init__(self, k0: float):
        super().__init__(f"k0 = {k0:.6g} <= 0: no positive periodic steady state")
        self.k0 = k0


class StabilityViolation(ValueError):
    pass


class BoundaryContamination(RuntimeError):
    def __init__(self, t: float, side: str, value: float):
        super().__init__(f"u reached the {side} boundary at t={t:.4g} (u={value:.3e}); enlarge X")
        self.t, self.side, self.value = t, side, value


class NoFront(ValueError):
    pass


@dataclass(frozen=True)
class KppNonlinearity:
    """f(x, u) = u (r(x) - gamma_sat(x) u) with gamma_sat > 0."""

    r: object
    gamma_sat: object = 1.0

    def __post_init__(self):
        object.__setattr__(self, "r", as_coefficient(self.r))
        object.__setattr__(self, "gamma_sat", as_coefficient(self.gamma_sat))
        probe = self.gamma_sat(np.linspace(0.0, self.gamma_sat.period, 512, endpoint=False))
        if np.any(probe <= 0):
            raise ValueError("gamma_sat must be positive")

    def __call__(self, x, u):
        return u * (self.r(x) - self.gamma_sat(x) * u)


def _logistic_flow(u, r, g, dt):
    """Exact solution of u' = u (r - g u) after time dt, nodewise."""
    out = np.empty_like(u)
    small = np.abs(r * dt) < 1e-12
    e = np.exp(r[~small] * dt)
    out[~small] = u[~small] * e / (1.0 + g[~small] * u[~small] * (e - 1.0) / r[~small])
    out[small] = u[small] / (1.0 + g[small] * u[small] * dt)
    return out


def _transport_matrix(b_half, h, periodic):
    """Sparse matrix of u -> u'' - (b u)' in flux form; b_half[i] sits at x_{i+1/2}.

    Periodic: len(b_half) = m.  Dirichlet: len(b_half) = m + 1 (ghost faces at
    both ends, u = 0 outside).
    """
    inv = 1.0 / h**2
    half = 0.5 / h
    if periodic:
        right = b_half
        left = np.roll(b_half, 1)
    else:
        right = b_half[1:]
        left = b_half[:-1]
    diag = -2.0 * inv - half * (right - left)
    upper = inv - half * right
    lower = inv + half * left
    m = diag.size
    A = sp.diags([lower[1:], diag, upper[:-1]], [-1, 0, 1], shape=(m, m), format="lil")
    if periodic:
        A[m - 1, 0] = upper[-1]
        A[0, m - 1] = lower[0]
    return A.tocsc()


@dataclass
class SteadyState:
    x: np.ndarray
    p: np.ndarray
    residual: float
    period: float = 1.0

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.x, self.p, period=self.period)


def periodic_steady_state(
    r,
    b=0.0,
    nl: KppNonlinearity | None = None,
    n: int = 1024,
    tol: float = 1e-8,
    *,
    start=None,
    max_time: float = 400.0,
    dt: float | None = None,
) -> SteadyState:
    """Positive periodic solution of p'' - (b p)' + p (r - gamma p) = 0.

    Time-marches from a constant start (default max r / min gamma), then
    polishes with Newton until the sup-norm residual is below ``tol``.
    """
    if nl is None:
        nl = KppNonlinearity(r)
    period = coefficient_period(r, b, nl.gamma_sat)
    k0 = principal_eigenvalue(r, b, 0.0, n, 1e-10, period=period)
    if k0 <= 0:
        raise NotPersistent(k0)

    grid = Grid(int(n), 0.0, float(period))
    x, h = grid.x, grid.h
    r_vals = sample(nl.r, grid)
    g_vals = sample(nl.gamma_sat, grid)
    b_half = as_coefficient(b)(x + 0.5 * h) if not isinstance(b, np.ndarray) else 0.5 * (b + np.roll(b, -1))
    A = _transport_matrix(np.asarray(b_half, dtype=float), h, periodic=True)
    if start is None:
        start = float(np.max(r_vals) / np.min(g_vals))
    p = np.full(grid.n, float(start)) if np.isscalar(start) else np.asarray(start, dtype=float).copy()

    def residual(v):
        return A @ v + v * (r_vals - g_vals * v)

    if dt is None:
        dt = min(0.05, 0.1 / max(np.max(np.abs(r_vals)), 1e-12))
    lu = splu((sp.identity(grid.n, format="csc") - dt * A).tocsc())
    t = 0.0
    while t < max_time:
        q = _logistic_flow(p, r_vals, g_vals, 0.5 * dt)
        q = lu.solve(q)
        q = _logistic_flow(q, r_vals, g_vals, 0.5 * dt)
        change = np.max(np.abs(q - p)) / dt
        p, t = q, t + dt
        if change < 1e-6:
            break

    for _ in range(50):
        res = residual(p)
        if np.max(np.abs(res)) <= tol:
            break
        J = A + sp.diags(r_vals - 2.0 * g_vals * p)
        p = p - spsolve(J.tocsc(), res)
    res = float(np.max(np.abs(residual(p))))
    if res > tol or np.any(p <= 0):
        raise NoConvergence(50, res)
    return SteadyState(x, p, res, float(period))


def default_initial_profile(x):
    """1 on [-1, 1], linear ramps to 0 over [1, 1.5] and [-1.5, -1]."""
    return np.clip((1.5 - np.abs(np.asarray(x, dtype=float))) / 0.5, 0.0, 1.0)


def _sup(c, period):
    probe = np.linspace(0.0, period, 2048, endpoint=False)
    return float(np.max(c(probe)))


def default_half_width(r, b, T: float) -> float:
    """20 + T (2 + max|b| + 2 sqrt(max r)): fronts stay clear of the boundary."""
    r, b = as_coefficient(r), as_coefficient(b)
    period = coefficient_period(r, b)
    r_max = max(_sup(r, period), 0.0)
    b_max = max(_sup(b, period), _sup(-b, period))
    return 20.0 + T * (2.0 + b_max + 2.0 * math.sqrt(r_max))


@dataclass
class SimulationRun:
    grid: Grid
    times: np.ndarray
    snapshots: np.ndarray
    trace_times: np.ndarray
    front_plus: np.ndarray
    front_minus: np.ndarray
    theta: float
    mass_history: np.ndarray
    dt: float
    min_value: float = 0.0
    max_value: float = 0.0
    ceiling: float = math.inf
    u0_max: float = 0.0

    @property
    def x(self):
        return self.grid.x

    @property
    def final(self):
        return self.snapshots[-1]


def front_position(x, u, theta: float, side: str = "plus") -> float:
    """Outermost crossing of the level theta (linear interpolation); NaN if none."""
    above = np.flatnonzero(u >= theta)
    if above.size == 0:
        return math.nan
    if side == "plus":
        i = above[-1]
        if i == u.size - 1:
            return float(x[i])
        return float(x[i] + (u[i] - theta) / (u[i] - u[i + 1]) * (x[i + 1] - x[i]))
    i = above[0]
    if i == 0:
        return float(x[0])
    return float(x[i] - (u[i] - theta) / (u[i] - u[i - 1]) * (x[i] - x[i - 1]))


def simulate_cauchy(
    r,
    b=0.0,
    nl: KppNonlinearity | None = None,
    X: float | None = None,
    T: float = 60.0,
    n: int | None = None,
    dt: float | None = None,
    u0=None,
    *,
    theta: float | None = None,
    store_every: float = 1.0,
    implicit: bool = True,
    points_per_unit: int = 32,
    check_boundary: bool = True,
) -> SimulationRun:
    """Integrate the Cauchy problem on [-X, X] with u = 0 at both ends.

    ``n`` is the number of subintervals; by default ``points_per_unit`` per
    unit length.  Front traces at level ``theta`` are recorded every step.
    """
    if nl is None:
        nl = KppNonlinearity(r)
    b = as_coefficient(b)
    period = coefficient_period(nl.r, b, nl.gamma_sat)
    if X is None:
        X = default_half_width(nl.r, b, T)
    if n is None:
        n = int(math.ceil(2 * X * points_per_unit))
    grid = Grid(int(n), -float(X), float(X), "dirichlet")
    x, h = grid.x, grid.h
    r_vals = nl.r(x)
    g_vals = nl.gamma_sat(x)
    faces = np.concatenate([x - 0.5 * h, [x[-1] + 0.5 * h]])
    b_half = b(faces)
    if h * np.max(np.abs(b_half)) > 2.0:
        raise StabilityViolation(f"h*max|b| = {h * np.max(np.abs(b_half)):.3g} > 2 breaks positivity; refine n")

    r_max = float(np.max(r_vals))
    if dt is None:
        dt = min(h, 0.1 / r_max) if r_max > 0 else h
    if not implicit and dt > h**2 / 4:
        raise StabilityViolation(f"explicit transport needs dt <= h^2/4 = {h**2 / 4:.3g}, got {dt:.3g}")

    u = default_initial_profile(x) if u0 is None else (u0(x) if callable(u0) else np.asarray(u0, dtype=float).copy())
    if u.shape != x.shape:
        raise ValueError(f"initial profile has shape {u.shape}, grid needs {x.shape}")
    if np.any(u < 0):
        raise ValueError("initial profile must be nonnegative")

    if theta is None:
        try:
            steady = periodic_steady_state(nl.r, b, nl, n=512)
            theta = 0.5 * float(np.min(steady.p))
        except NotPersistent:
            theta = 0.1

    A = _transport_matrix(b_half, h, periodic=False)
    steps = int(math.ceil(T / dt - 1e-9))
    dt = T / steps if steps else dt
    if implicit:
        transport = splu((sp.identity(x.size, format="csc") - dt * A).tocsc()).solve
    else:
        def transport(v):
            return v + dt * (A @ v)
    stride = max(1, int(round(store_every / dt)))

    db = derivative_samples(b, Grid(1024, 0.0, period)) if not isinstance(b, Constant) else np.zeros(1)
    ceiling = max(float(np.max(u)), float(np.max(r_vals) + np.max(np.abs(db))) / float(np.min(g_vals)))

    times, snaps, mass = [0.0], [u.copy()], [h * float(np.sum(u))]
    trace_t = np.empty(steps + 1)
    fp = np.empty(steps + 1)
    fm = np.empty(steps + 1)
    trace_t[0] = 0.0
    fp[0], fm[0] = front_position(x, u, theta, "plus"), front_position(x, u, theta, "minus")
    lo, hi = float(np.min(u)), float(np.max(u))
    for step in range(1, steps + 1):
        u = _logistic_flow(u, r_vals, g_vals, 0.5 * dt)
        u = transport(u)
        u = _logistic_flow(u, r_vals, g_vals, 0.5 * dt)
        t = step * dt
        u_max = float(np.max(u))
        lo, hi = min(lo, float(np.min(u))), max(hi, u_max)
        if check_boundary and u_max > 0:
            for side, val in (("left", u[0]), ("right", u[-1])):
                if val > 1e-8 * u_max:
                    raise BoundaryContamination(t, side, float(val))
        trace_t[step] = t
        fp[step] = front_position(x, u, theta, "plus")
        fm[step] = front_position(x, u, theta, "minus")
        if step % stride == 0 or step == steps:
            times.append(t)
            snaps.append(u.copy())
            mass.append(h * float(np.sum(u)))

    return SimulationRun(
        grid=grid,
        times=np.array(times),
        snapshots=np.array(snaps),
        trace_times=trace_t,
        front_plus=fp,
        front_minus=fm,
        theta=float(theta),
        mass_history=np.array(mass),
        dt=dt,
        min_value=lo,
        max_value=hi,
        ceiling=ceiling,
        u0_max=float(np.max(snaps[0])),
    )


@dataclass
class FrontTrace:
    times: np.ndarray
    plus: np.ndarray
    minus: np.ndarray

    @property
    def no_front(self) -> np.ndarray:
        return np.isnan(self.plus)


def front_positions(run: SimulationRun, theta: float | None = None) -> FrontTrace:
    """x+(t), x-(t) at level theta; NaN where u never reaches theta.

    With theta equal to the run's own level the dense per-step traces are
    returned, otherwise the stored snapshots are scanned.
    """
    if theta is None or theta == run.theta:
        return FrontTrace(run.trace_times, run.front_plus, run.front_minus)
    x = run.grid.x
    plus = np.array([front_position(x, u, theta, "plus") for u in run.snapshots])
    minus = np.array([front_position(x, u, theta, "minus") for u in run.snapshots])
    return FrontTrace(run.times, plus, minus)


def _slope(t, y):
    A = np.vstack([t, np.ones_like(t)]).T
    return float(np.linalg.lstsq(A, y, rcond=None)[0][0])


def empirical_speeds(run, window_fraction: float = 0.5):
    """Least-squares front speeds over the last ``window_fraction`` of the run.

    Returns (c_plus_hat, c_minus_hat); the leftward speed is positive when
    the left front moves left.  ``run`` may also be a FrontTrace.
    """
    trace = run if isinstance(run, FrontTrace) else front_positions(run)
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    t = np.asarray(trace.times, dtype=float)
    start = t[-1] - window_fraction * (t[-1] - t[0])
    mask = t >= start - 1e-12
    if mask.sum() < 2:
        raise NoFront("fit window holds fewer than two samples")
    plus, minus = np.asarray(trace.plus)[mask], np.asarray(trace.minus)[mask]
    if np.any(np.isnan(plus)) or np.any(np.isnan(minus)):
        raise NoFront("front level not reached inside the fit window")
    return _slope(t[mask], plus), -_slope(t[mask], minus)


@dataclass
class ConvergenceTrace:
    times: np.ndarray
    deviation: np.ndarray
    extinct: bool = False

    @property
    def decreasing(self) -> bool:
        """Late half of the trace does not trend upward.

        A plateau at the discretisation floor counts as decreasing, so the
        least-squares slope may exceed 0 by 1e-6 per unit time.
        """
        half = self.times.size // 2
        if self.times.size - half < 2:
            return True
        return _slope(self.times[half:], self.deviation[half:]) <= 1e-6


def local_convergence_check(run: SimulationRun, steady: SteadyState | None, window=(-2.0, 2.0)) -> ConvergenceTrace:
    """sup over ``window`` of |u(t) - p| for every stored snapshot.

    ``steady=None`` is the extinction branch: the deviation is measured from 0.
    """
    x = run.grid.x
    mask = (x >= window[0]) & (x <= window[1])
    if not mask.any():
        raise ValueError("window contains no grid nodes")
    target = np.zeros(mask.sum()) if steady is None else steady(x[mask])
    dev = np.array([float(np.max(np.abs(u[mask] - target))) for u in run.snapshots])
    return ConvergenceTrace(run.times, dev, extinct=steady is None)
