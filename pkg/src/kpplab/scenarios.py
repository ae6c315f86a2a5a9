"""Verification suites with machine-readable reports.

Each suite returns a SuiteReport made of cases.  Every case records the
measured numbers, the relation they must satisfy, the tolerance and where the
target comes from: ``published`` (a value quoted in the literature this
package reproduces), ``derived`` (an identity checked by independent
computations) or ``exact`` (a closed form).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .coeffs import Grid, as_coefficient, build_tent_profile, derivative, mean, rescale
from .eigen import (
    coefficient_period,
    principal_eigenpair_dirichlet,
    principal_eigenvalue,
    richardson_dirichlet,
    richardson_eigenvalue,
)
from .export import emit_csv, emit_svg_lineplot
from .speeds import golden_section, spreading_speed
from .transforms import check_even_symmetry, liouville_reduce

__all__ = [
    "Case",
    "SuiteReport",
    "AStarNotFound",
    "SUITES",
    "run_suite",
    "run_advection_flip_suite",
    "run_period_scaling_suite",
    "run_bounded_domain_suite",
    "run_persistence_vs_speed_suite",
    "run_persistence_condition_suite",
    "slow_limit_speed",
    "growth_with_eigenvalue",
    "ADVECTION",
]

ADVECTION = "cos(2*pi*x)+sin(4*pi*x)"
ORIGINS = ("published", "derived", "exact")


class AStarNotFound(RuntimeError):
    pass


@dataclass
class Case:
    description: str
    measured: dict
    relation: str
    tolerance: float
    passed: bool
    origin: str = "derived"
    control: bool = False

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}")
        self.passed = bool(self.passed)
        self.measured = {k: _clean(v) for k, v in self.measured.items()}


def _clean(v):
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


@dataclass
class SuiteReport:
    suite_name: str
    cases: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    figures: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def add(self, description, measured, relation, tolerance, passed, origin="derived", control=False):
        case = Case(description, measured, relation, tolerance, passed, origin, control)
        self.cases.append(case)
        return case

    def case(self, description: str) -> Case:
        for c in self.cases:
            if c.description == description:
                return c
        raise KeyError(description)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite_name,
            "passed": self.passed,
            "cases": [asdict(c) for c in self.cases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, outdir, svg: bool = True) -> list:
        """Write report.json, cases.csv, the data tables and optional plots."""
        root = Path(outdir) / self.suite_name
        root.mkdir(parents=True, exist_ok=True)
        paths = []
        report = root / "report.json"
        report.write_text(self.to_json(), encoding="utf-8")
        paths.append(report)
        paths.append(
            emit_csv(
                {
                    "index": list(range(len(self.cases))),
                    "description": [c.description for c in self.cases],
                    "relation": [c.relation for c in self.cases],
                    "tolerance": [c.tolerance for c in self.cases],
                    "origin": [c.origin for c in self.cases],
                    "control": [c.control for c in self.cases],
                    "passed": [c.passed for c in self.cases],
                    "measured": [json.dumps(c.measured, sort_keys=True) for c in self.cases],
                },
                root / "cases.csv",
            )
        )
        for name, table in sorted(self.tables.items()):
            paths.append(emit_csv(table, root / f"{name}.csv"))
        if svg:
            for name, (series, labels) in sorted(self.figures.items()):
                paths.append(emit_svg_lineplot(series, root / f"{name}.svg", **labels))
        self.artifacts = [str(p) for p in paths]
        return paths

    def summary_lines(self) -> list:
        lines = []
        for i, c in enumerate(self.cases):
            flag = "PASS" if c.passed else "FAIL"
            tag = " (control)" if c.control else ""
            lines.append(f"[{flag}] {self.suite_name}#{i} {c.description}{tag}: {c.relation}")
        return lines


def _close(value, target, tol):
    return abs(value - target) <= tol


def growth_with_eigenvalue(b, eta: float = 1.0):
    """r = b^2/4 + b'/2 + eta, for which k_0[r; b] = eta exactly."""
    b = as_coefficient(b)
    return b * b * 0.25 + derivative(b) * 0.5 + eta


# --------------------------------------------------------------------------


def run_advection_flip_suite(n: int = 1024, tol: float = 1e-10) -> SuiteReport:
    """Effect of reversing the advection on k_0 and c_+."""
    rep = SuiteReport("advection_flip")
    b = as_coefficient(ADVECTION)
    neg = -b

    def k0(r, bb):
        return richardson_eigenvalue(r, bb, 0.0, n, tol)

    def c(r, bb, direction="right"):
        return spreading_speed(r, bb, direction, n=n, eig_tol=tol).value

    # r = beta + gamma b: the flip leaves k_0 and c_+ unchanged
    r = b + 2.0
    vals = {"k0[r;b]": k0(r, b), "k0[r;-b]": k0(r, neg)}
    for key, v in vals.items():
        rep.add(f"r=2+b: {key}", {key: v}, "= 2.016", 5e-3, _close(v, 2.016, 5e-3), "published")
    speeds = {
        "c+[r;b]": c(r, b),
        "c+[r;-b]": c(r, neg),
        "c-[r;b]": c(r, b, "left"),
        "c-[r;-b]": c(r, neg, "left"),
    }
    for key in ("c+[r;b]", "c+[r;-b]"):
        rep.add(f"r=2+b: {key}", {key: speeds[key]}, "= 2.819", 5e-3, _close(speeds[key], 2.819, 5e-3), "published")
    spread = max(speeds.values()) - min(speeds.values())
    rep.add("r=2+b: all four speeds coincide", speeds, "max - min <= 1e-3", 1e-3, spread <= 1e-3, "derived")

    # generic r: the flip changes both
    r = as_coefficient("2+2*sin(2*pi*x)")
    targets = {
        "k0[r;b]": (k0(r, b), 2.221),
        "k0[r;-b]": (k0(r, neg), 1.892),
        "c+[r;b]": (c(r, b), 2.933),
        "c+[r;-b]": (c(r, neg), 2.745),
    }
    for key, (v, t) in targets.items():
        rep.add(f"r=2+2sin: {key}", {key: v}, f"= {t}", 5e-3, _close(v, t, 5e-3), "published")

    # r = b^2/4 + b'/2 + 1 for two zero-mean advections
    for label, bb in (("b", b), ("cos", as_coefficient("cos(2*pi*x)"))):
        r = growth_with_eigenvalue(bb, 1.0)
        kp, km = k0(r, bb), k0(r, -bb)
        rep.add(f"eta=1 [{label}]: k0[r;b] = eta", {"k0[r;b]": kp}, "= 1", 1e-3, _close(kp, 1.0, 1e-3), "published")
        rep.add(f"eta=1 [{label}]: k0[r;-b] > eta", {"k0[r;-b]": km}, "> 1 + 1e-3", 1e-3, km > 1.0 + 1e-3, "published")
        cp, cm = c(r, bb), c(r, -bb, "left")
        rep.add(
            f"eta=1 [{label}]: c+[r;b] < c-[r;-b]",
            {"c+[r;b]": cp, "c-[r;-b]": cm},
            "c+[r;b] < c-[r;-b] - 1e-3",
            1e-3,
            cp < cm - 1e-3,
            "derived",
        )

    # even coefficients: k_lam[r;b] = k_{-lam}[r;-b]
    sym = check_even_symmetry("1+cos(2*pi*x)", "cos(2*pi*x)", 0.0, n=n, tol=tol)
    rep.add(
        "even pair: k_lam[r;b] = k_-lam[r;-b]",
        {"lambdas": sym.lambdas, "gaps": sym.gaps},
        "max gap <= 1e-6",
        1e-6,
        sym.passed,
        "derived",
    )
    return rep


# --------------------------------------------------------------------------


def slow_limit_speed(r, b, points: int = 4096, scan: int = 64):
    """min over k > M of k / j(k), j(k) = int_0^1 sqrt(k - r + b^2/4).

    Returns (speed, M).  j uses the midpoint rule with the integrand clamped
    at zero; the minimisation is a coarse scan refined by golden section.
    """
    r, b = as_coefficient(r), as_coefficient(b)
    x = (np.arange(points) + 0.5) / points
    q = r(x) - 0.25 * b(x) ** 2
    M = float(np.max(q))
    if not M > 0:
        raise ValueError("the slow limit needs max(r - b^2/4) > 0")

    def ratio(k):
        return k / float(np.mean(np.sqrt(np.clip(k - q, 0.0, None))))

    top = M + 20.0 * max(float(np.max(r(x))), 1.0)
    ks = M + (top - M) * (np.arange(1, scan + 1) / scan) ** 2
    vals = [ratio(k) for k in ks]
    i = int(np.argmin(vals))
    lo = ks[i - 1] if i > 0 else M + 1e-12 * max(1.0, M)
    hi = ks[min(i + 1, scan - 1)]
    _, value = golden_section(ratio, lo, hi, xtol=1e-10, ftol=1e-12)
    return float(min(value, vals[i])), M


def run_period_scaling_suite(
    L_grid=None,
    n: int = 1024,
    tol: float = 1e-10,
    *,
    r="1+0.5*sin(2*pi*x)",
    b="cos(2*pi*x)",
    offset_b="0.5+cos(2*pi*x)",
) -> SuiteReport:
    """Limits L -> 0 and L -> infinity of k_0 and c_+ for r(x/L), b(x/L)."""
    rep = SuiteReport("period_scaling")
    if L_grid is None:
        L_grid = [2.0**j for j in range(-4, 5)]
    L_grid = sorted(float(L) for L in L_grid)
    r, b = as_coefficient(r), as_coefficient(b)
    r_bar = mean(r, 4096)
    if not r_bar > 0:
        raise ValueError("period scaling needs mean(r) > 0")

    rows = {"L": [], "k0_plus": [], "k0_minus": [], "c_plus_b": [], "c_plus_minus_b": []}
    for L in L_grid:
        rL, bL = rescale(r, L), rescale(b, L)
        rows["L"].append(L)
        rows["k0_plus"].append(richardson_eigenvalue(rL, bL, 0.0, n, tol))
        rows["k0_minus"].append(richardson_eigenvalue(rL, -bL, 0.0, n, tol))
        rows["c_plus_b"].append(spreading_speed(rL, bL, "right", n=n, eig_tol=tol).value)
        rows["c_plus_minus_b"].append(spreading_speed(rL, -bL, "right", n=n, eig_tol=tol).value)
    rep.tables["sweep"] = rows
    rep.figures["k0_vs_L"] = (
        [
            {"x": np.log2(rows["L"]), "y": rows["k0_plus"], "label": "k0[rL;bL]"},
            {"x": np.log2(rows["L"]), "y": rows["k0_minus"], "label": "k0[rL;-bL]", "dashed": True},
        ],
        {"title": "principal eigenvalue against log2 L", "xlabel": "log2 L", "ylabel": "k0"},
    )

    k_plus = np.array(rows["k0_plus"])
    steps = np.diff(k_plus)
    rep.add(
        "L -> k0[rL;bL] nondecreasing",
        {"L": L_grid, "k0": list(k_plus)},
        "successive differences >= -1e-9",
        1e-9,
        bool(np.all(steps >= -1e-9)),
        "derived",
    )
    x = np.linspace(0.0, 1.0, 8192, endpoint=False)
    M = float(np.max(r(x) - 0.25 * b(x) ** 2))
    i_small, i_big = 0, len(L_grid) - 1
    gap_small = abs(k_plus[i_small] - r_bar)
    rep.add(
        f"L={L_grid[i_small]:g}: k0 near mean(r)",
        {"k0": k_plus[i_small], "mean(r)": r_bar},
        "|k0 - mean(r)| < 0.02",
        0.02,
        gap_small < 0.02,
        "derived",
    )
    gap_big = abs(k_plus[i_big] - M)
    rep.add(
        f"L={L_grid[i_big]:g}: k0 near max(r - b^2/4)",
        {"k0": k_plus[i_big], "max(r-b^2/4)": M},
        "|k0 - max(r - b^2/4)| < 0.05",
        0.05,
        gap_big < 0.05,
        "derived",
    )
    c_fast = 2.0 * math.sqrt(r_bar) + mean(b, 4096)
    rep.add(
        f"L={L_grid[i_small]:g}: c+ near mean(b) + 2 sqrt(mean r)",
        {"c+": rows["c_plus_b"][i_small], "limit": c_fast},
        "|c+ - limit| < 0.02",
        0.02,
        abs(rows["c_plus_b"][i_small] - c_fast) < 0.02,
        "derived",
    )
    slow, _ = slow_limit_speed(r, b)
    c_big = rows["c_plus_b"][i_big]
    rep.add(
        f"L={L_grid[i_big]:g}: c+ near the slow-limit speed",
        {"c+": c_big, "slow limit": slow},
        "|c+ - min k/j(k)| < 0.05",
        0.05,
        abs(c_big - slow) < 0.05,
        "derived",
    )

    # nonzero-mean advection: c+[b] - c+[-b] -> 2 mean(b) as L -> 0
    ob = as_coefficient(offset_b)
    L = L_grid[i_small]
    rL, bL = rescale(r, L), rescale(ob, L)
    diff = spreading_speed(rL, bL, n=n, eig_tol=tol).value - spreading_speed(rL, -bL, n=n, eig_tol=tol).value
    target = 2.0 * mean(ob, 4096)
    rep.add(
        f"L={L:g}, mean(b)!=0: c+[b] - c+[-b] near 2 mean(b)",
        {"difference": diff, "2 mean(b)": target},
        "|difference - 2 mean(b)| < 0.02",
        0.02,
        abs(diff - target) < 0.02,
        "derived",
    )
    return rep


# --------------------------------------------------------------------------


def run_bounded_domain_suite(r_list=("0", "1+x^2", "cos(pi*x)"), n: int = 1024, tol: float = 1e-10) -> SuiteReport:
    """On [-1, 1] with b(x) = x, reversing b shifts k^d by exactly -1."""
    rep = SuiteReport("bounded_domain")
    rows = {"r": [], "b": [], "kd_b": [], "kd_minus_b": [], "shift": []}
    for r in r_list:
        kp = richardson_dirichlet(r, "x", (-1.0, 1.0), n, tol)
        km = richardson_dirichlet(r, "-x", (-1.0, 1.0), n, tol)
        shift = kp - km
        rows["r"].append(str(r))
        rows["b"].append("x")
        rows["kd_b"].append(kp)
        rows["kd_minus_b"].append(km)
        rows["shift"].append(shift)
        rep.add(f"r={r}: kd[r;x] - kd[r;-x]", {"shift": shift}, "= -1", 1e-6, _close(shift, -1.0, 1e-6), "published")
    kp = richardson_dirichlet("1", "x^3", (-1.0, 1.0), n, tol)
    km = richardson_dirichlet("1", "-x^3", (-1.0, 1.0), n, tol)
    shift = kp - km
    rows["r"].append("1")
    rows["b"].append("x^3")
    rows["kd_b"].append(kp)
    rows["kd_minus_b"].append(km)
    rows["shift"].append(shift)
    rep.add(
        "control b=x^3: shift differs from -1",
        {"shift": shift},
        "|shift + 1| > 1e-3",
        1e-3,
        abs(shift + 1.0) > 1e-3,
        "derived",
        control=True,
    )
    rep.tables["shifts"] = rows
    return rep


# --------------------------------------------------------------------------

SPEED_CORPUS = (
    "1+3*sin(2*pi*x)",
    "2+4*cos(2*pi*x)",
    "1+3*sin(2*pi*x)+2*cos(4*pi*x)",
    "5*sin(2*pi*x)",
    "3+6*sin(2*pi*x)^3",
    "1+8*sin(2*pi*x)^2",
    "10*cos(2*pi*x)",
    "2-6*cos(4*pi*x)",
    "1+4*sin(2*pi*x)+3*sin(6*pi*x)",
    "12*sin(pi*x)^4",
)


def run_persistence_vs_speed_suite(
    M: float = 1.0, n: int = 1024, tol: float = 1e-10, *, A_grid=(0.0, -1e2, -1e3, -1e4, -1e5), corpus=SPEED_CORPUS
) -> SuiteReport:
    """Large k_0 with slow spreading: the tent profile and the 2 sqrt(k_0) bound."""
    rep = SuiteReport("persistence_vs_speed")
    R = M + 16.0 * math.pi**2

    lam = 1.0
    anchor = principal_eigenpair_dirichlet(R, 0.0, (0.0, 0.25), n, tol, lam=lam).eigenvalue
    rep.add(
        "quarter-cell Dirichlet anchor",
        {"kd": anchor, "R - 16 pi^2": M},
        "= R - 16 pi^2",
        1e-2,
        _close(anchor, M, 1e-2),
        "published",
    )

    rows = {"A": [], "k0": [], "c_plus": []}
    a_star = None
    grid = list(A_grid)
    extended = False
    i = 0
    while i < len(grid):
        A = float(grid[i])
        tent = build_tent_profile(R, A)
        k0 = richardson_eigenvalue(tent, 0.0, 0.0, n, tol)
        cp = spreading_speed(tent, 0.0, n=n, eig_tol=tol).value
        rows["A"].append(A)
        rows["k0"].append(k0)
        rows["c_plus"].append(cp)
        if a_star is None and cp < 1.0 / M:
            a_star = A
        i += 1
        if i == len(grid) and a_star is None and not extended:
            grid.append(10.0 * min(grid))
            extended = True
    if a_star is None:
        raise AStarNotFound(f"c+ stays >= 1/M down to A = {grid[-1]:g}")
    rep.tables["tent"] = rows

    k0s = np.array(rows["k0"])
    rep.add(
        "tent: k0 > M for every A",
        {"A": rows["A"], "k0": list(k0s)},
        "k0 > M + 1e-4",
        1e-4,
        bool(np.all(k0s > M + 1e-4)),
        "published",
    )
    j = rows["A"].index(a_star)
    rep.add(
        "tent: some A gives c+ < 1/M",
        {"A*": a_star, "k0": rows["k0"][j], "c+": rows["c_plus"][j]},
        "k0 > M and c+ < 1/M",
        0.0,
        rows["k0"][j] > M and rows["c_plus"][j] < 1.0 / M,
        "derived",
    )
    rep.add(
        "tent: k0 decreases toward M as A decreases",
        {"A": rows["A"], "k0": list(k0s)},
        "strictly decreasing, all above M",
        0.0,
        bool(np.all(np.diff(k0s) < 0) and np.all(k0s > M)),
        "derived",
    )

    # a non-constant profile below a constant one spreads slower
    rt = as_coefficient("1+sin(2*pi*x)")
    k_rt = richardson_eigenvalue(rt, 0.0, 0.0, n, tol)
    r_const = k_rt + 0.5
    c_rt = spreading_speed(rt, 0.0, n=n, eig_tol=tol).value
    rep.add(
        "non-constant r~ with k0[r~] <= r: c+[r~] < 2 sqrt(r)",
        {"k0[r~]": k_rt, "r": r_const, "c+[r~]": c_rt},
        "c+ < 2 sqrt(r)",
        0.0,
        0.0 < c_rt < 2.0 * math.sqrt(r_const),
        "derived",
    )

    rows = {"r": [], "k0": [], "c_plus": [], "bound": [], "margin": []}
    for expr in corpus:
        k0 = richardson_eigenvalue(expr, 0.0, 0.0, n, tol)
        if not k0 > 0:
            continue
        cp = spreading_speed(expr, 0.0, n=n, eig_tol=tol).value
        bound = 2.0 * math.sqrt(k0)
        rows["r"].append(expr)
        rows["k0"].append(k0)
        rows["c_plus"].append(cp)
        rows["bound"].append(bound)
        rows["margin"].append(bound - cp)
    rep.tables["speed_bound"] = rows
    margins = np.array(rows["margin"])
    rep.add(
        "non-constant r: 0 < c+ < 2 sqrt(k0)",
        {"count": len(margins), "min margin": float(margins.min()) if margins.size else math.nan},
        "margin > 1e-3 for every profile",
        1e-3,
        bool(margins.size and np.all(margins > 1e-3) and np.all(np.array(rows["c_plus"]) > 0)),
        "published",
    )
    return rep


# --------------------------------------------------------------------------

CONDITION_CORPUS = (
    ("0.5+sin(2*pi*x)", "cos(2*pi*x)"),
    ("0.3", "sin(2*pi*x)"),
    ("1+cos(2*pi*x)", "1.5*sin(2*pi*x)"),
    ("0.1+2*sin(2*pi*x)", "cos(4*pi*x)"),
)


def run_persistence_condition_suite(
    r="1", b="cos(2*pi*x)", R_grid=(1.0, 2.0, 4.0, 8.0, 16.0), n: int = 1024, tol: float = 1e-10, *, corpus=CONDITION_CORPUS
) -> SuiteReport:
    """Dirichlet eigenvalues on [-R, R] increase to the reduced periodic eigenvalue."""
    rep = SuiteReport("persistence_condition")
    R_grid = sorted(float(R) for R in R_grid)

    def kd(rr, bb, R):
        return richardson_dirichlet(rr, bb, (-R, R), max(n, int(128 * R)), tol)

    exact = [1.0 - (math.pi / (2.0 * R)) ** 2 for R in R_grid]
    flat = [kd("1", "0", R) for R in R_grid]
    err = max(abs(a - e) for a, e in zip(flat, exact))
    rep.add(
        "r=1, b=0: kd(R) = 1 - (pi/2R)^2",
        {"R": R_grid, "kd": flat, "max error": err},
        "max error <= 1e-3",
        1e-3,
        err <= 1e-3,
        "exact",
    )

    values = [kd(r, b, R) for R in R_grid]
    k_periodic = richardson_eigenvalue(r, b, 0.0, n, tol)
    k_limit = _reduced(r, b, n, tol)
    rep.tables["dirichlet"] = {"R": R_grid, "kd": values, "kd_flat": flat, "kd_flat_exact": exact}
    rep.figures["dirichlet"] = (
        [
            {"x": R_grid, "y": values, "label": "kd(R)"},
            {"x": R_grid, "y": [k_limit] * len(R_grid), "label": "reduced periodic", "dashed": True},
        ],
        {"title": "Dirichlet eigenvalue on [-R, R]", "xlabel": "R", "ylabel": "k"},
    )
    rep.add(
        "kd(R) strictly increasing",
        {"R": R_grid, "kd": values},
        "successive differences > 0",
        0.0,
        bool(np.all(np.diff(values) > 0)),
        "derived",
    )
    rep.add(
        "kd(R) < k0[r;b]",
        {"max kd": max(values), "k0[r;b]": k_periodic},
        "every kd(R) below k0",
        0.0,
        max(values) < k_periodic,
        "derived",
    )
    gap = abs(values[-1] - k_limit)
    rep.add(
        f"R={R_grid[-1]:g}: kd near k0[r - b'/2 - b^2/4; 0]",
        {"kd": values[-1], "limit": k_limit},
        "gap < 0.05",
        0.05,
        gap < 0.05,
        "published",
    )

    rows = {"r": [], "b": [], "4 mean r - mean b^2": [], "limit": []}
    ok = True
    for rr, bb in corpus:
        margin = 4.0 * mean(rr, 4096) - mean(as_coefficient(bb) * as_coefficient(bb), 4096)
        lim = _reduced(rr, bb, n, tol)
        rows["r"].append(rr)
        rows["b"].append(bb)
        rows["4 mean r - mean b^2"].append(margin)
        rows["limit"].append(lim)
        if margin > 0 and not lim > 0:
            ok = False
    rep.tables["sufficient_condition"] = rows
    rep.add(
        "4 mean(r) > mean(b^2) implies a positive limit",
        {"margins": rows["4 mean r - mean b^2"], "limits": rows["limit"]},
        "limit > 0 whenever the margin is positive",
        0.0,
        ok,
        "derived",
    )
    return rep


def _reduced(r, b, n, tol):
    """k_0 of the Liouville potential r - b'/2 - b^2/4, Richardson-extrapolated."""
    period = coefficient_period(r, b)
    values = []
    for m in (n, 2 * n):
        grid = Grid(int(m), 0.0, period)
        values.append(principal_eigenvalue(liouville_reduce(r, b, grid), 0.0, 0.0, m, tol, period=period))
    return (4.0 * values[1] - values[0]) / 3.0


# --------------------------------------------------------------------------

SUITES = {
    "advection_flip": run_advection_flip_suite,
    "period_scaling": run_period_scaling_suite,
    "bounded_domain": run_bounded_domain_suite,
    "persistence_vs_speed": run_persistence_vs_speed_suite,
    "persistence_condition": run_persistence_condition_suite,
}


def run_suite(name: str, outdir=None, svg: bool = True, **kwargs) -> SuiteReport:
    try:
        suite = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    report = suite(**kwargs)
    if outdir is not None:
        report.write(outdir, svg=svg)
    return report
