"""Command-line entry point and run-configuration parsing.

Config files are flat ``key = value`` lines.  A ``[eigen]``, ``[speed]``,
``[simulate]``, ``[mirror]`` or ``[suite]`` header selects the command, and a
``[pde]`` header opens the time-stepping block.  ``#`` starts a comment.

    [speed]
    r = 2 + 2*sin(2*pi*x)
    b = cos(2*pi*x) + sin(4*pi*x)
    n = 1024

Command-line flags override values read from the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .coeffs import ExpressionSyntaxError, as_coefficient, parse_expression, rescale
from .export import OutputError, emit_csv, emit_svg_lineplot

__all__ = [
    "ConfigError",
    "UnknownKey",
    "TypeMismatch",
    "MissingRequired",
    "RunConfig",
    "parse_config",
    "main",
    "OUTDIR_ENV",
]

OUTDIR_ENV = "KPPLAB_OUTDIR"
DEFAULT_OUTDIR = "kpplab_out"
COMMANDS = ("eigen", "speed", "simulate", "mirror", "suite")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class MissingRequired(ConfigError):
    pass


@dataclass
class RunConfig:
    command: str | None = None
    r_expr: str | None = None
    b_expr: str = "0"
    lam: float = 0.0
    L: float = 1.0
    n: int = 1024
    tol: float = 1e-10
    direction: str = "both"
    beta: float | None = None
    gamma: float | None = None
    X: float | None = None
    T: float = 60.0
    dt: float | None = None
    theta: float | None = None
    suite: str | None = None
    outdir: str | None = None
    emit_svg: bool = True
    pair: bool = False
    lines: dict = field(default_factory=dict, repr=False, compare=False)


def _expr(text):
    parse_expression(text)
    return text.strip()


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise ValueError("must be a positive integer")
    return value


def _real(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _positive(text):
    value = _real(text)
    if value <= 0:
        raise ValueError("must be positive")
    return value


def _flag(text):
    key = text.strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be true or false")


def _direction(text):
    key = text.strip().lower()
    if key not in ("right", "left", "both"):
        raise ValueError("must be right, left or both")
    return key


def _suite(text):
    from .scenarios import SUITES

    name = text.strip()
    if name not in SUITES:
        raise ValueError(f"unknown suite; choose from {', '.join(sorted(SUITES))}")
    return name


def _text(text):
    return text.strip()


# config key -> (RunConfig field, parser)
GLOBAL_KEYS = {
    "r": ("r_expr", _expr),
    "b": ("b_expr", _expr),
    "lambda": ("lam", _real),
    "L": ("L", _positive),
    "n": ("n", _positive_int),
    "tol": ("tol", _positive),
    "direction": ("direction", _direction),
    "beta": ("beta", _real),
    "gamma": ("gamma", _real),
    "suite": ("suite", _suite),
    "name": ("suite", _suite),
    "outdir": ("outdir", _text),
    "emit_svg": ("emit_svg", _flag),
    "command": ("command", None),
}
PDE_KEYS = {
    "X": ("X", _positive),
    "T": ("T", _positive),
    "dt": ("dt", _positive),
    "theta": ("theta", _positive),
    "pair": ("pair", _flag),
}


def _command(text):
    key = text.strip().lower()
    if key not in COMMANDS:
        raise ValueError(f"must be one of {', '.join(COMMANDS)}")
    return key


def parse_config(src: str, *, validate: bool = True) -> RunConfig:
    """Parse config text into a RunConfig with defaults filled in."""
    cfg = RunConfig()
    section = None
    for lineno, raw in enumerate(src.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name == "pde":
                section = "pde"
            elif name in COMMANDS:
                section = name
                if cfg.command is not None and cfg.command != name:
                    raise TypeMismatch(f"second command section [{name}] after [{cfg.command}]", lineno)
                cfg.command = name
                cfg.lines["command"] = lineno
            else:
                raise UnknownKey(f"unknown section [{name}]", lineno)
            continue
        if "=" not in line:
            raise TypeMismatch(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        table = PDE_KEYS if section == "pde" else GLOBAL_KEYS
        if key not in table:
            where = "[pde]" if section == "pde" else "this section"
            raise UnknownKey(f"unknown key {key!r} in {where}", lineno)
        attr, parse = table[key]
        if attr == "command":
            parse = _command
        try:
            setattr(cfg, attr, parse(value))
        except (ValueError, ExpressionSyntaxError) as exc:
            raise TypeMismatch(f"{key} = {value!r}: {exc}", lineno) from None
        cfg.lines[attr] = lineno
    if validate:
        check_required(cfg)
    return cfg


def check_required(cfg: RunConfig) -> RunConfig:
    if cfg.command is None:
        raise MissingRequired("no command given (use a [eigen]/[speed]/... section or 'command = ...')")
    if cfg.command in ("eigen", "speed", "simulate", "mirror") and cfg.r_expr is None:
        raise MissingRequired(f"'{cfg.command}' needs r", cfg.lines.get("command"))
    if cfg.command == "mirror" and (cfg.beta is None or cfg.gamma is None):
        raise MissingRequired("'mirror' needs beta and gamma", cfg.lines.get("command"))
    if cfg.command == "suite" and cfg.suite is None:
        raise MissingRequired("'suite' needs a suite name", cfg.lines.get("command"))
    return cfg


# --------------------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(
        prog="kpplab",
        description="Periodic principal eigenvalues, spreading speeds and Fisher-KPP fronts.",
        epilog="Expressions use x, pi, numbers, + - * / ^ (or **) and sin cos exp sqrt abs. "
        "'^' binds tighter than unary minus and is right-associative: -x^2 = -(x^2).",
    )
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="config file; flags override its values")
        sp.add_argument("--r", dest="r_expr", help="growth rate r(x)")
        sp.add_argument("--b", dest="b_expr", help="advection b(x)")
        sp.add_argument("--L", dest="L", type=float, help="period scaling: use r(x/L), b(x/L)")
        sp.add_argument("--n", dest="n", type=int, help="grid nodes per period (default 1024)")
        sp.add_argument("--tol", dest="tol", type=float, help="eigenvalue tolerance (default 1e-10)")
        sp.add_argument("--out", dest="outdir", help=f"output directory (default ${OUTDIR_ENV} or ./{DEFAULT_OUTDIR})")
        sp.add_argument("--no-svg", dest="emit_svg", action="store_false", default=None)

    sp = sub.add_parser("eigen", help="principal eigenvalue k_lambda[r; b]")
    common(sp)
    sp.add_argument("--lambda", dest="lam", type=float)

    sp = sub.add_parser("speed", help="spreading speeds c+ and c-")
    common(sp)
    sp.add_argument("--direction", choices=("right", "left", "both"))

    sp = sub.add_parser("simulate", help="integrate the Cauchy problem and track fronts")
    common(sp)
    sp.add_argument("--X", dest="X", type=float)
    sp.add_argument("--T", dest="T", type=float)
    sp.add_argument("--dt", dest="dt", type=float)
    sp.add_argument("--theta", dest="theta", type=float)
    sp.add_argument("--pair", dest="pair", action="store_true", default=None, help="also run with -b and overlay")

    sp = sub.add_parser("mirror", help="build the eigenfunction of L_0[r; -b] when r = beta + gamma b")
    common(sp)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--gamma", type=float)

    sp = sub.add_parser("suite", help="run a verification suite")
    sp.add_argument("suite", nargs="?")
    sp.add_argument("--config")
    sp.add_argument("--out", dest="outdir")
    sp.add_argument("--no-svg", dest="emit_svg", action="store_false", default=None)

    sub.add_parser("list-suites", help="list the verification suites")
    return p


def _merge(args) -> RunConfig:
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
        cfg = parse_config(text, validate=False)
        if cfg.command is not None and cfg.command != args.command:
            raise TypeMismatch(f"config is for '{cfg.command}' but '{args.command}' was requested", cfg.lines.get("command"))
    else:
        cfg = RunConfig()
    cfg.command = args.command
    names = {f.name for f in fields(RunConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in names and k != "command" and v is not None}
    for key, value in overrides.items():
        try:
            if key in ("r_expr", "b_expr"):
                value = _expr(value)
            elif key == "n":
                value = _positive_int(str(value))
            elif key in ("tol", "L", "X", "T", "dt", "theta"):
                value = _positive(str(value))
            elif key == "suite":
                value = _suite(value)
        except (ValueError, ExpressionSyntaxError) as exc:
            raise TypeMismatch(f"--{key.replace('_expr', '')}: {exc}") from None
        setattr(cfg, key, value)
    return check_required(cfg)


def _outdir(cfg: RunConfig) -> Path:
    return Path(cfg.outdir or os.environ.get(OUTDIR_ENV) or DEFAULT_OUTDIR)


def _coeffs(cfg: RunConfig):
    r, b = as_coefficient(cfg.r_expr), as_coefficient(cfg.b_expr)
    if cfg.L != 1.0:
        r, b = rescale(r, cfg.L), rescale(b, cfg.L)
    return r, b


def _run_eigen(cfg, out):
    from .eigen import principal_eigenpair_periodic, richardson_eigenvalue

    r, b = _coeffs(cfg)
    res = principal_eigenpair_periodic(r, b, cfg.lam, cfg.n, cfg.tol)
    k_rich = richardson_eigenvalue(r, b, cfg.lam, cfg.n, cfg.tol)
    path = emit_csv({"x": res.x, "psi": res.eigenfunction}, out / "eigenfunction.csv")
    print(json.dumps({"k": res.eigenvalue, "k_richardson": k_rich, "residual": res.residual, "n": res.grid.n}))
    print(f"wrote {path}")
    return EXIT_OK


def _run_speed(cfg, out):
    from .speeds import spreading_speed

    r, b = _coeffs(cfg)
    directions = ("right", "left") if cfg.direction == "both" else (cfg.direction,)
    summary = {}
    for d in directions:
        res = spreading_speed(r, b, d, n=cfg.n, eig_tol=cfg.tol)
        key = "c_plus" if d == "right" else "c_minus"
        summary[key] = "extinct" if res.extinct else res.value
        summary["k0"] = res.k0
        if res.curve:
            lam, F = zip(*res.curve)
            path = emit_csv({"lambda": lam, "F": F}, out / f"speed_curve_{d}.csv")
            print(f"wrote {path}")
    print(json.dumps(summary))
    return EXIT_OK


def _run_simulate(cfg, out):
    from .pde import empirical_speeds, simulate_cauchy

    r, b = _coeffs(cfg)
    runs = [("b", b)] + ([("-b", -b)] if cfg.pair else [])
    summary, series = {}, []
    for label, adv in runs:
        run = simulate_cauchy(r, adv, X=cfg.X, T=cfg.T, dt=cfg.dt, theta=cfg.theta, store_every=cfg.T / 10)
        cp, cm = empirical_speeds(run)
        tag = "" if label == "b" else "_minus_b"
        emit_csv({"t": run.trace_times, "x_plus": run.front_plus, "x_minus": run.front_minus}, out / f"fronts{tag}.csv")
        snapshots = {"x": run.x}
        for t, u in zip(run.times, run.snapshots):
            snapshots[f"u(t={t:g})"] = u
        emit_csv(snapshots, out / f"snapshots{tag}.csv")
        if not series:
            series.append({"x": run.x, "y": run.snapshots[0], "label": "u(0)", "dashed": True, "color": "#555555"})
        series.append({"x": run.x, "y": run.final, "label": f"u({cfg.T:g}) [{label}]"})
        summary[label] = {"c_plus_hat": cp, "c_minus_hat": cm, "theta": run.theta, "dt": run.dt}
    if cfg.emit_svg:
        emit_svg_lineplot(series, out / "profiles.svg", title="Fisher-KPP profiles", xlabel="x", ylabel="u")
    print(json.dumps(summary if cfg.pair else summary["b"]))
    print(f"wrote {out}")
    return EXIT_OK


def _run_mirror(cfg, out):
    from .transforms import construct_mirror_eigenfunction

    r, b = _coeffs(cfg)
    n = max(cfg.n, 2048)
    m = construct_mirror_eigenfunction(r, b, cfg.beta, cfg.gamma, n, cfg.tol)
    emit_csv({"x": m.x, "phi_plus": m.phi_plus, "phi_minus": m.phi_minus, "g": m.g, "h": m.h}, out / "mirror.csv")
    if cfg.emit_svg:
        emit_svg_lineplot(
            [{"x": m.x, "y": m.phi_plus, "label": "phi+"}, {"x": m.x, "y": m.phi_minus, "label": "phi-"}],
            out / "mirror.svg",
            title="principal eigenfunctions for b and -b",
            xlabel="x",
            ylabel="phi",
        )
    print(json.dumps({"k0": m.eigenvalue, "residual": m.residual, "C": m.C}))
    return EXIT_OK


def _run_suite(cfg, out):
    from .scenarios import run_suite

    report = run_suite(cfg.suite, outdir=out, svg=cfg.emit_svg)
    for line in report.summary_lines():
        print(line)
    print(f"{cfg.suite}: {'PASS' if report.passed else 'FAIL'} ({out / cfg.suite})")
    return EXIT_OK if report.passed else EXIT_FAIL


def _list_suites():
    from .scenarios import SUITES

    for name, func in SUITES.items():
        doc = (func.__doc__ or "").strip().splitlines()
        print(f"{name:24s} {doc[0] if doc else ''}")
    return EXIT_OK


RUNNERS = {
    "eigen": _run_eigen,
    "speed": _run_speed,
    "simulate": _run_simulate,
    "mirror": _run_mirror,
    "suite": _run_suite,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    if args.command == "list-suites":
        return _list_suites()
    try:
        cfg = _merge(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _outdir(cfg)
    try:
        return RUNNERS[cfg.command](cfg, out)
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
