"""Spreading speeds from the Freidlin-Gartner quotients

    c_+ = inf_{lam > 0} k_lam / lam,      c_- = inf_{lam > 0} k_{-lam} / lam.

lam -> k_lam is convex, so lam * d/dlam (k_lam / lam) = k' lam - k is
nondecreasing and the quotient is unimodal on (0, inf).  The minimiser is
bracketed with rigorous lower bounds for the quotient and then located by
golden-section search.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import as_coefficient
from .eigen import BracketFailure, coefficient_period, principal_eigenvalue, richardson_eigenvalue, zero_order_bounds

__all__ = [
    "Direction",
    "SpeedStatus",
    "SpeedResult",
    "golden_section",
    "bracket_minimizer",
    "speed_curve",
    "spreading_speed",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
LAMBDA_CAP = 2.0**20


class Direction(enum.Enum):
    RIGHT = 1
    LEFT = -1

    @classmethod
    def coerce(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("right", "+", "plus"):
                return cls.RIGHT
            if key in ("left", "-", "minus"):
                return cls.LEFT
        if value in (1, -1):
            return cls(value)
        raise ValueError(f"unknown direction {value!r}")

    @property
    def sign(self) -> int:
        return self.value


class SpeedStatus(enum.Enum):
    EXTINCT = "extinct"
    SPREADING = "spreading"


@dataclass
class SpeedResult:
    status: SpeedStatus
    direction: Direction
    k0: float
    value: float | None = None
    lambda_star: float | None = None
    curve: list = field(default_factory=list)
    bracket: tuple | None = None
    evaluations: int = 0

    @property
    def extinct(self) -> bool:
        return self.status is SpeedStatus.EXTINCT

    def __float__(self):
        # extinction maps to -inf in numeric contexts
        return -math.inf if self.extinct else float(self.value)


def golden_section(f, a, b, xtol=1e-8, ftol=1e-10, max_iter=200):
    """Minimise a unimodal f on [a, b]; returns (x_min, f_min)."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < xtol * max(1.0, abs(c)) and abs(fc - fd) < ftol * max(1.0, abs(fc)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


class _Quotient:
    """lam -> k_{sign*lam} / lam with memoised eigen-solves."""

    def __init__(self, r, b, direction, n, tol, period, richardson):
        self.r, self.b = r, b
        self.sign = direction.sign
        self.n, self.tol, self.period = n, tol, period
        self.richardson = richardson
        self.cache = {}

    def k(self, lam):
        solve = richardson_eigenvalue if self.richardson else principal_eigenvalue
        return solve(self.r, self.b, lam, self.n, self.tol, period=self.period)

    def __call__(self, lam):
        lam = float(lam)
        if lam not in self.cache:
            self.cache[lam] = self.k(self.sign * lam) / lam
        return self.cache[lam]

    def curve(self):
        return sorted(self.cache.items())


def _bracket(F, r, b, direction, k0, period, n):
    sign = direction.sign
    samples = [2.0**j for j in range(-3, 4)]
    values = [F(lam) for lam in samples]
    best_i = int(np.argmin(values))
    best, lam_best = values[best_i], samples[best_i]

    # upper end: k_lam >= lam^2 + lam*min(sign*b) + min(r)
    grid_n = max(n, 256)
    min_r = zero_order_bounds(r, 0.0, 0.0, grid_n, period)[0]
    b_signed = _signed(b, sign)
    min_b = zero_order_bounds(b_signed, 0.0, 0.0, grid_n, period)[0]

    def lower_hi(lam):
        return lam + min_b + min_r / lam

    lam_hi = lam_best
    floor_hi = math.sqrt(max(min_r, 0.0))
    while lam_hi <= lam_best or lam_hi < floor_hi or not lower_hi(lam_hi) > best:
        lam_hi *= 2.0
        if lam_hi > LAMBDA_CAP:
            raise BracketFailure("no upper bracket for the Freidlin-Gartner minimiser below 2^20")

    # lower end: convexity gives k_lam >= k0 + lam * (k0 - k_{-sign})
    slope = k0 - F.k(-sign * 1.0)
    lam_lo = lam_best
    while lam_lo >= lam_best or not (k0 / lam_lo + slope > best):
        lam_lo /= 2.0
        if lam_lo < 1.0 / LAMBDA_CAP:
            raise BracketFailure("no lower bracket for the Freidlin-Gartner minimiser above 2^-20")
    return lam_lo, lam_hi


def _signed(b, sign):
    if sign > 0:
        return b
    if isinstance(b, np.ndarray):
        return -b
    return -as_coefficient(b)


def bracket_minimizer(r, b, direction="right", k0=None, n=1024, tol=1e-10, *, period=None, richardson=True):
    """(lam_lo, lam_hi) containing the minimiser of k_{+-lam} / lam.

    Outside the bracket the quotient provably exceeds its best sampled value.
    """
    direction = Direction.coerce(direction)
    if period is None:
        period = coefficient_period(r, b)
    F = _Quotient(r, b, direction, n, tol, period, richardson)
    if k0 is None:
        k0 = F.k(0.0)
    if not k0 > 0:
        raise ValueError("bracket_minimizer needs k0 > 0; extinct cases have no minimiser")
    return _bracket(F, r, b, direction, k0, period, n)


def speed_curve(r, b, direction, lambdas, n=1024, tol=1e-10, *, period=None, richardson=False):
    """[(lam, k_{+-lam}/lam)] for each lam, one eigen-solve per point."""
    direction = Direction.coerce(direction)
    lambdas = [float(lam) for lam in lambdas]
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("lambda values must be positive")
    if period is None:
        period = coefficient_period(r, b)
    F = _Quotient(r, b, direction, n, tol, period, richardson)
    return [(lam, F(lam)) for lam in lambdas]


def spreading_speed(
    r,
    b=0.0,
    direction="right",
    n: int = 1024,
    tol: float = 1e-8,
    *,
    eig_tol: float = 1e-10,
    period=None,
    richardson: bool = True,
    scan_points: int = 32,
) -> SpeedResult:
    """c_+ (``direction="right"``) or c_- (``"left"``) of the pair (r, b).

    Returns an EXTINCT result when k_0 <= 0.  ``tol`` controls the
    golden-section stopping width; eigenvalues use ``eig_tol``.
    """
    direction = Direction.coerce(direction)
    if period is None:
        period = coefficient_period(r, b)
    F = _Quotient(r, b, direction, n, eig_tol, period, richardson)
    k0 = F.k(0.0)
    # a k0 inside the eigen-solver resolution cannot be told apart from 0
    if k0 <= 10.0 * eig_tol:
        return SpeedResult(SpeedStatus.EXTINCT, direction, k0)

    lam_lo, lam_hi = _bracket(F, r, b, direction, k0, period, n)
    lam_star, value = golden_section(F, lam_lo, lam_hi, xtol=tol, ftol=tol * 1e-2)

    # guard against a bracket mistake with a coarse log-spaced scan
    scan = np.geomspace(lam_lo, lam_hi, scan_points)
    scan_vals = [F(lam) for lam in scan]
    i = int(np.argmin(scan_vals))
    if scan_vals[i] < value - 10 * tol:
        a = scan[max(i - 1, 0)]
        c = scan[min(i + 1, scan_points - 1)]
        lam_star, value = golden_section(F, a, c, xtol=tol, ftol=tol * 1e-2)

    curve = F.curve()
    lam_min, val_min = min(curve, key=lambda item: item[1])
    if val_min < value:
        lam_star, value = lam_min, val_min
    return SpeedResult(
        SpeedStatus.SPREADING,
        direction,
        k0,
        value=float(value),
        lambda_star=float(lam_star),
        curve=curve,
        bracket=(lam_lo, lam_hi),
        evaluations=len(curve),
    )
