"""Principal eigenpairs of the discretised operators

    L_lam[r; b] psi = psi'' + (b + 2 lam) psi' + (lam^2 + lam b + r) psi

on a periodicity cell (periodic boundary) or on an interval (Dirichlet).

Central differences give a tridiagonal matrix (with two corner entries in
the periodic case) whose off-diagonal entries are nonnegative as soon as
h * max|b + 2 lam| <= 2.  The matrix is then Metzler and irreducible, so
Perron-Frobenius applies: the principal eigenvalue is real, simple, and has
a positive eigenvector, and for any positive vector v

    min_i (Mv)_i / v_i  <=  k  <=  max_i (Mv)_i / v_i      (Collatz-Wielandt).

The default solver runs inverse iteration on (sigma I - M) with sigma set
just above the current Collatz-Wielandt upper bound; (sigma I - M)^-1 is then
a positive matrix, so each step is a Perron power step that converges in a
handful of iterations.  The Collatz-Wielandt bracket is the stopping test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .coeffs import Grid, as_coefficient, sample

__all__ = [
    "PositivityViolation",
    "NoConvergence",
    "BracketFailure",
    "OperatorMatrix",
    "EigenResult",
    "assemble_periodic",
    "assemble_dirichlet",
    "principal_eigenpair",
    "principal_eigenpair_periodic",
    "principal_eigenpair_adjoint",
    "principal_eigenpair_dirichlet",
    "principal_eigenvalue",
    "richardson_eigenvalue",
    "richardson_dirichlet",
    "monodromy_oracle",
    "coefficient_period",
    "zero_order_bounds",
]

MAX_NODES = 2**20
_EPS = np.finfo(float).eps


class PositivityViolation(ValueError):
    """The grid is too coarse for a nonnegative off-diagonal stencil."""

    def __init__(self, required_n, h_drift):
        self.required_n = required_n
        super().__init__(
            f"h*max|b+2*lambda| = {h_drift:.4g} > 2; refine to at least n = {required_n}"
        )


class NoConvergence(RuntimeError):
    def __init__(self, max_iter, gap=None):
        self.max_iter = max_iter
        self.gap = gap
        msg = f"no convergence after {max_iter} iterations"
        if gap is not None:
            msg += f" (Collatz-Wielandt gap {gap:.3g})"
        super().__init__(msg)


class BracketFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class OperatorMatrix:
    """Tridiagonal matrix with periodic corners.

    Row i reads ``sub[i]*v[i-1] + diag[i]*v[i] + sup[i]*v[i+1]``; in the
    periodic case v[-1] and v[n] wrap around (``corner_lo`` is entry
    (0, n-1), ``corner_hi`` entry (n-1, 0)).  ``rowsum`` is the exact row sum
    (diag + sub + sup), kept separately because forming it from the entries
    cancels O(1/h^2) terms.
    """

    n: int
    diag: np.ndarray
    sub: np.ndarray
    sup: np.ndarray
    corner_lo: float
    corner_hi: float
    rowsum: np.ndarray
    h: float
    drift: np.ndarray
    periodic: bool = True
    shift_applied: float = 0.0

    def to_sparse(self):
        n = self.n
        m = sp.diags([self.diag, self.sup[:-1], self.sub[1:]], [0, 1, -1], format="lil")
        if self.periodic:
            m[0, n - 1] += self.corner_lo
            m[n - 1, 0] += self.corner_hi
        return m.tocsc()

    def to_dense(self):
        return self.to_sparse().toarray()

    def _neighbours(self, v):
        if self.periodic:
            return np.roll(v, 1), np.roll(v, -1)
        left = np.concatenate(([0.0], v[:-1]))
        right = np.concatenate((v[1:], [0.0]))
        return left, right

    def matvec(self, v):
        """M @ v in difference form (rowsum*v + sub*(v_left - v) + sup*(v_right - v))."""
        v = np.asarray(v, dtype=float)
        left, right = self._neighbours(v)
        return self.rowsum * v + self.sub * (left - v) + self.sup * (right - v)

    def quotients(self, v):
        """Collatz-Wielandt quotients (Mv)_i / v_i for a positive vector."""
        left, right = self._neighbours(v)
        return self.rowsum + (self.sub * (left - v) + self.sup * (right - v)) / v

    def transpose(self) -> "OperatorMatrix":
        # rows of the transpose sum to zero_order - (discrete derivative of the drift)
        d = self.drift / self.h
        if self.periodic:
            sub_t = np.roll(self.sup, 1)
            sup_t = np.roll(self.sub, -1)
            delta = (np.roll(d, 1) - np.roll(d, -1)) / 2.0
        else:
            # ghost coefficients use the drift extended by a constant; they
            # only ever multiply the zero boundary values
            h2 = 1.0 / self.h**2
            sub_t = np.concatenate(([h2 + d[0] / 2.0], self.sup[:-1]))
            sup_t = np.concatenate((self.sub[1:], [h2 - d[-1] / 2.0]))
            padded = np.concatenate(([d[0]], d, [d[-1]]))
            delta = (padded[:-2] - padded[2:]) / 2.0
        return OperatorMatrix(
            n=self.n,
            diag=self.diag.copy(),
            sub=sub_t,
            sup=sup_t,
            corner_lo=self.corner_hi,
            corner_hi=self.corner_lo,
            rowsum=self.rowsum + delta,
            h=self.h,
            drift=-self.drift,
            periodic=self.periodic,
            shift_applied=self.shift_applied,
        )

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.diag) + np.abs(self.sub) + np.abs(self.sup)))


@dataclass
class EigenResult:
    eigenvalue: float
    eigenfunction: np.ndarray
    residual: float
    iterations: int
    grid: Grid
    lam: float = 0.0
    lower: float = field(default=float("nan"))
    upper: float = field(default=float("nan"))
    tol: float = field(default=float("nan"))

    @property
    def x(self):
        return self.grid.x


# --------------------------------------------------------------------------
# assembly


def coefficient_period(*coeffs, default=1.0) -> float:
    periods = set()
    for c in coeffs:
        if c is None or isinstance(c, (np.ndarray, list, tuple)):
            continue
        c = as_coefficient(c)
        if type(c).__name__ == "Constant":
            continue
        periods.add(c.period)
    if len(periods) > 1:
        raise ValueError(f"coefficients have different periods {sorted(periods)}")
    return periods.pop() if periods else default


def _stencil(r_vals, b_vals, lam, h):
    drift = b_vals + 2.0 * lam
    sub = 1.0 / h**2 - drift / (2.0 * h)
    sup = 1.0 / h**2 + drift / (2.0 * h)
    zero_order = lam**2 + lam * b_vals + r_vals
    diag = zero_order - 2.0 / h**2
    return drift, sub, sup, diag, zero_order


def _check_positivity(drift, grid: Grid):
    h_drift = grid.h * float(np.max(np.abs(drift))) if drift.size else 0.0
    if h_drift > 2.0 * (1 + 1e-12):
        required = int(math.ceil(grid.length * np.max(np.abs(drift)) / 2.0))
        raise PositivityViolation(required, h_drift)


def assemble_periodic(r, b, lam: float, grid: Grid) -> OperatorMatrix:
    if grid.kind != "periodic":
        raise ValueError("assemble_periodic needs a periodic grid")
    r_vals = sample(r, grid)
    b_vals = sample(0.0 if b is None else b, grid)
    drift, sub, sup, diag, zero_order = _stencil(r_vals, b_vals, lam, grid.h)
    _check_positivity(drift, grid)
    return OperatorMatrix(
        n=grid.n,
        diag=diag,
        sub=sub,
        sup=sup,
        corner_lo=float(sub[0]),
        corner_hi=float(sup[-1]),
        rowsum=zero_order,
        h=grid.h,
        drift=drift,
        periodic=True,
    )


def assemble_dirichlet(r, b, grid: Grid, lam: float = 0.0) -> OperatorMatrix:
    if grid.kind != "dirichlet":
        raise ValueError("assemble_dirichlet needs a Dirichlet grid")
    r_vals = sample(r, grid)
    b_vals = sample(0.0 if b is None else b, grid)
    drift, sub, sup, diag, zero_order = _stencil(r_vals, b_vals, lam, grid.h)
    _check_positivity(drift, grid)
    # boundary rows drop their outside neighbour; keep the entries so the
    # difference form (with zero ghost values) stays exact
    return OperatorMatrix(
        n=grid.size,
        diag=diag,
        sub=sub,
        sup=sup,
        corner_lo=0.0,
        corner_hi=0.0,
        rowsum=zero_order,
        h=grid.h,
        drift=drift,
        periodic=False,
    )


# --------------------------------------------------------------------------
# Perron solvers


def _floor(op: OperatorMatrix) -> float:
    # Collatz-Wielandt quotients of a vector stored in double precision
    # cannot be resolved below a few ulps of the operator norm
    return 64.0 * _EPS * op.norm


def _perron_inverse(op: OperatorMatrix, tol, max_iter):
    n = op.n
    floor = _floor(op)
    A = op.to_sparse()
    eye = sp.identity(n, format="csc")
    v = np.ones(n)
    estimate = previous = None
    sigma = None
    best_gap = np.inf
    stalled = 0
    inside = []
    for it in range(1, max_iter + 1):
        q = op.quotients(v)
        lo, hi = float(q.min()), float(q.max())
        gap = hi - lo
        target = max(tol * max(1.0, abs(hi)), floor)
        settled = previous is not None and abs(estimate - previous) <= tol * max(1.0, abs(hi))
        if estimate is not None and gap <= target:
            if settled or gap <= tol * max(1.0, abs(hi)):
                return estimate, v, lo, hi, it - 1, sigma
            # the estimate can cycle at round-off level without settling;
            # the median of a few bracketed iterates is as good as it gets
            inside.append(estimate)
            if len(inside) >= 6:
                return float(np.median(inside)), v, lo, hi, it - 1, sigma
        else:
            inside = []
        # eigenfunctions spanning many decades leave the quotients noisier
        # than the floor; stop once the gap no longer shrinks and the
        # eigenvalue estimate has settled
        stalled = stalled + 1 if gap > 0.5 * best_gap else 0
        best_gap = min(best_gap, gap)
        if stalled >= 3 and settled:
            return estimate, v, lo, hi, it - 1, sigma
        previous = estimate
        # hi bounds k from above, so any positive offset keeps sigma*I - M
        # inverse-positive; a small one makes the iteration contract fast
        sigma = hi + max(min(gap, 1e-2 * max(1.0, abs(hi))), 1e-8 * max(1.0, abs(hi)), 4 * floor)
        y = splu((sigma * eye - A).tocsc()).solve(v)
        y_max = float(np.max(y))
        if not y_max > 0 or np.min(y) < -1e-10 * y_max:
            raise NoConvergence(it, gap)
        # round-off can push entries deep inside a strong sink to <= 0
        y = np.maximum(y, np.finfo(float).tiny * y_max)
        estimate = sigma - float(v @ v) / float(v @ y)
        v = y / y.max()
    q = op.quotients(v)
    raise NoConvergence(max_iter, float(q.max() - q.min()))


def _perron_power(op: OperatorMatrix, tol, max_iter, h):
    """Plain power iteration on M + s I (all entries nonnegative, diagonal positive)."""
    s = 2.0 / h**2 + float(np.max(np.abs(op.rowsum))) + 1.0
    floor = _floor(op)
    v = np.ones(op.n)
    estimate = np.inf
    for it in range(1, max_iter + 1):
        w = op.matvec(v) + s * v
        growth = float(w.max())
        new_estimate = growth - s
        v = w / growth
        q = op.quotients(v)
        lo, hi = float(q.min()), float(q.max())
        change = abs(new_estimate - estimate)
        estimate = new_estimate
        target = max(tol * max(1.0, abs(estimate)), floor)
        if change < target and hi - lo <= target:
            return estimate, v, lo, hi, it, s
    raise NoConvergence(max_iter, hi - lo)


def _solve(op: OperatorMatrix, grid: Grid, lam, tol, max_iter, method):
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method == "inverse":
        max_iter = 100 if max_iter is None else max_iter
        k, v, lo, hi, its, shift = _perron_inverse(op, tol, max_iter)
    elif method == "power":
        max_iter = 200 * op.n if max_iter is None else max_iter
        k, v, lo, hi, its, shift = _perron_power(op, tol, max_iter, grid.h)
    else:
        raise ValueError(f"unknown method {method!r}")
    v = v / v.max()
    residual = float(np.max(np.abs(op.matvec(v) - k * v)))
    effective_tol = max(tol * max(1.0, abs(k)), _floor(op), hi - lo)
    return EigenResult(
        eigenvalue=float(k),
        eigenfunction=v,
        residual=residual,
        iterations=its,
        grid=grid,
        lam=lam,
        lower=lo,
        upper=hi,
        tol=effective_tol,
    )


def _periodic_grid(r, b, n, period):
    if period is None:
        period = coefficient_period(r, b)
    return Grid(int(n), 0.0, float(period), "periodic")


def _auto_refine(build, grid: Grid, refine: bool):
    while True:
        try:
            return build(grid), grid
        except PositivityViolation as exc:
            if not refine:
                raise
            new_n = grid.n
            while new_n < exc.required_n:
                new_n *= 2
            if new_n > MAX_NODES:
                raise
            grid = Grid(new_n, grid.a, grid.b, grid.kind)


def principal_eigenpair_periodic(
    r,
    b=0.0,
    lam: float = 0.0,
    n: int = 1024,
    tol: float = 1e-10,
    *,
    period: float | None = None,
    method: str = "inverse",
    max_iter: int | None = None,
    refine: bool = True,
) -> EigenResult:
    """Principal periodic eigenpair (k_lam[r; b], psi > 0) on n nodes.

    ``r`` and ``b`` may be coefficients, expression text, numbers, or sample
    vectors of length n.  The period defaults to the coefficients' period.
    If the positivity certificate fails, n is doubled until it holds.
    """
    grid = _periodic_grid(r, b, n, period)
    if isinstance(r, np.ndarray) or isinstance(b, np.ndarray):
        refine = False
    op, grid = _auto_refine(lambda g: assemble_periodic(r, b, lam, g), grid, refine)
    return _solve(op, grid, lam, tol, max_iter, method)


principal_eigenpair = principal_eigenpair_periodic


def principal_eigenpair_adjoint(
    r,
    b=0.0,
    lam: float = 0.0,
    n: int = 1024,
    tol: float = 1e-10,
    *,
    period: float | None = None,
    method: str = "inverse",
    max_iter: int | None = None,
    refine: bool = True,
) -> EigenResult:
    """Same as the periodic solver, applied to the transpose of the matrix."""
    grid = _periodic_grid(r, b, n, period)
    if isinstance(r, np.ndarray) or isinstance(b, np.ndarray):
        refine = False
    op, grid = _auto_refine(lambda g: assemble_periodic(r, b, lam, g).transpose(), grid, refine)
    return _solve(op, grid, lam, tol, max_iter, method)


def principal_eigenpair_dirichlet(
    r,
    b=0.0,
    interval=(-1.0, 1.0),
    n: int = 1024,
    tol: float = 1e-10,
    *,
    lam: float = 0.0,
    method: str = "inverse",
    max_iter: int | None = None,
    refine: bool = True,
) -> EigenResult:
    """Principal Dirichlet eigenpair on ``interval`` with n subintervals (n-1 unknowns)."""
    a, c = map(float, interval)
    grid = Grid(int(n), a, c, "dirichlet")
    if isinstance(r, np.ndarray) or isinstance(b, np.ndarray):
        refine = False
    op, grid = _auto_refine(lambda g: assemble_dirichlet(r, b, g, lam), grid, refine)
    return _solve(op, grid, lam, tol, max_iter, method)


def principal_eigenvalue(r, b=0.0, lam=0.0, n=1024, tol=1e-10, **kwargs) -> float:
    return principal_eigenpair_periodic(r, b, lam, n, tol, **kwargs).eigenvalue


def richardson_eigenvalue(r, b=0.0, lam: float = 0.0, n: int = 1024, tol: float = 1e-10, **kwargs) -> float:
    """(4 k_2n - k_n) / 3, cancelling the O(h^2) discretisation error."""
    coarse = principal_eigenvalue(r, b, lam, n, tol, **kwargs)
    fine = principal_eigenvalue(r, b, lam, 2 * n, tol, **kwargs)
    return (4.0 * fine - coarse) / 3.0


def richardson_dirichlet(r, b=0.0, interval=(-1.0, 1.0), n: int = 1024, tol: float = 1e-10, **kwargs) -> float:
    coarse = principal_eigenpair_dirichlet(r, b, interval, n, tol, **kwargs).eigenvalue
    fine = principal_eigenpair_dirichlet(r, b, interval, 2 * n, tol, **kwargs).eigenvalue
    return (4.0 * fine - coarse) / 3.0


def zero_order_bounds(r, b=0.0, lam: float = 0.0, n: int = 4096, period=None):
    """min and max of lam^2 + lam b + r, bounds for k_lam."""
    grid = _periodic_grid(r, b, n, period)
    vals = lam**2 + lam * sample(0.0 if b is None else b, grid) + sample(r, grid)
    return float(vals.min()), float(vals.max())


# --------------------------------------------------------------------------
# monodromy oracle


def _step_matrices(c_vals, drift, k, h):
    """RK4 propagators for y' = A(x) y, y = (psi, psi'), over each step."""
    m = (c_vals.size - 1) // 2

    def A(idx):
        out = np.zeros((idx.size, 2, 2))
        out[:, 0, 1] = 1.0
        out[:, 1, 0] = k - c_vals[idx]
        out[:, 1, 1] = -drift[idx]
        return out

    j = np.arange(m)
    A0, Ah, A1 = A(2 * j), A(2 * j + 1), A(2 * j + 2)
    eye = np.broadcast_to(np.eye(2), A0.shape)
    K1 = A0
    K2 = Ah @ (eye + 0.5 * h * K1)
    K3 = Ah @ (eye + 0.5 * h * K2)
    K4 = A1 @ (eye + h * K3)
    return eye + (h / 6.0) * (K1 + 2 * K2 + 2 * K3 + K4)


def _chain(mats):
    """Ordered product S_{m-1} ... S_1 S_0 by pairwise reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate((mats, np.eye(2)[None]), axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def _floquet_characteristic(c_vals, drift, k, h):
    """(1 - mu1)(1 - mu2) = 1 - trace + det of the monodromy matrix."""
    phi = _chain(_step_matrices(c_vals, drift, k, h))
    scale = max(1.0, float(np.max(np.abs(phi))))
    return (1.0 - np.trace(phi) + np.linalg.det(phi)) / scale


def monodromy_oracle(r, b=0.0, lam: float = 0.0, n_rk: int = 2048, *, period=None, tol: float = 1e-10) -> float:
    """k_lam[r; b] by Floquet shooting, independent of the finite-difference solver.

    The characteristic (1 - mu1)(1 - mu2) of the period map vanishes exactly
    when k is a periodic eigenvalue and is negative for every k above the
    principal one (one multiplier above 1, one below), so the principal
    eigenvalue is the largest root.  Roots are located by scanning down from
    the upper bound max(lam^2 + lam b + r) with geometric steps, then bisected.
    """
    if n_rk < 256:
        raise ValueError("n_rk must be at least 256")
    if period is None:
        period = coefficient_period(r, b)
    h = period / n_rk
    xs = np.linspace(0.0, period, 2 * n_rk + 1)
    r_vals = as_coefficient(r)(xs)
    b_vals = as_coefficient(0.0 if b is None else b)(xs)
    c_vals = lam**2 + lam * b_vals + r_vals
    drift = b_vals + 2.0 * lam

    lo_bound, hi_bound = float(c_vals.min()), float(c_vals.max())
    spread = hi_bound - lo_bound
    pad = 1e-6 * max(1.0, abs(hi_bound), spread)

    def P(k):
        return _floquet_characteristic(c_vals, drift, k, h)

    top = hi_bound + pad
    if P(top) >= 0:
        raise BracketFailure(f"characteristic not negative at the upper bound {top:.6g}")
    bottom = lo_bound - pad
    step = pad
    upper = top
    while True:
        lower = max(top - step, bottom)
        if P(lower) >= 0:
            break
        if lower <= bottom:
            raise BracketFailure("no sign change between the eigenvalue bounds")
        upper = lower
        step *= 2.0
    while upper - lower > tol * max(1.0, abs(upper)):
        mid = 0.5 * (lower + upper)
        if P(mid) < 0:
            upper = mid
        else:
            lower = mid
    return 0.5 * (lower + upper)
