"""Periodic coefficient functions: parsing, evaluation, sampling, quadrature.

Coefficients are callables on numpy arrays with a ``period`` attribute.
They come from the small arithmetic language parsed here, from constants,
from piecewise-linear breakpoint tables, or from plain Python callables.

Grammar (``^`` binds tighter than unary minus and is right-associative)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | 'pi' | 'x' | func '(' expr ')' | '(' expr ')'
    func  := sin | cos | exp | sqrt | abs
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

__all__ = [
    "ExpressionSyntaxError",
    "UnknownIdentifier",
    "DomainError",
    "NonPositivePeriod",
    "Num",
    "Var",
    "Pi",
    "Neg",
    "BinOp",
    "Call",
    "Coefficient",
    "Constant",
    "CoefficientExpr",
    "FunctionCoefficient",
    "PiecewiseLinearCoefficient",
    "Rescaled",
    "Derivative",
    "Grid",
    "parse_expression",
    "serialize",
    "evaluate",
    "as_coefficient",
    "sample",
    "mean",
    "derivative",
    "derivative_samples",
    "periodic_derivative",
    "antiderivative_samples",
    "rescale",
    "build_tent_profile",
]

FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")


class ExpressionSyntaxError(ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset in the UTF-8 encoded source where parsing
    stopped and ``expected`` the set of tokens that would have been accepted.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownIdentifier(ExpressionSyntaxError):
    def __init__(self, name, offset):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class DomainError(ArithmeticError):
    """Evaluation left the real domain; ``subexpr`` is the offending node."""

    def __init__(self, subexpr, reason):
        self.subexpr = subexpr
        self.reason = reason
        super().__init__(f"{reason} in {subexpr}")


class NonPositivePeriod(ValueError):
    pass


# --------------------------------------------------------------------------
# expression tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


Node = Union[Num, Var, Pi, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = []  # (kind, text, char_offset)
        pos = 0
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
                raise ExpressionSyntaxError(f"unexpected character {src[start]!r}", self._bytes(start))
            kind = m.lastgroup
            text = m.group(kind)
            start = m.start(kind)
            if kind == "op" and text == "**":
                text = "^"
            self.tokens.append((kind, text, start))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))
        self.i = 0

    def _bytes(self, char_offset):
        return len(self.src[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, off = self.peek()
        what = "end of input" if kind == "end" else f"token {text!r}"
        raise ExpressionSyntaxError(f"unexpected {what}", self._bytes(off), expected)

    def expect(self, text):
        if self.peek()[1] != text or self.peek()[0] == "end":
            self.fail({text})
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, off = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "name":
            self.advance()
            if text == "x":
                return Var()
            if text == "pi":
                return Pi()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise UnknownIdentifier(text, self._bytes(off))
        if (kind, text) == ("op", "("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"number", "x", "pi", "(", "-"} | set(FUNCTIONS))


def serialize(node: Node) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Neg):
        return f"(-{serialize(node.operand)})"
    if isinstance(node, BinOp):
        return f"({serialize(node.left)} {node.op} {serialize(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({serialize(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def _eval(node: Node, x):
    if isinstance(node, Num):
        return np.full_like(x, node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Pi):
        return np.full_like(x, math.pi)
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Call):
        a = _eval(node.arg, x)
        if node.func == "sqrt":
            if np.any(a < 0):
                raise DomainError(serialize(node), "square root of a negative number")
            return np.sqrt(a)
        return getattr(np, node.func)(a)
    left = _eval(node.left, x)
    right = _eval(node.right, x)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        if np.any(right == 0):
            raise DomainError(serialize(node), "division by zero")
        return left / right
    # '^'
    if np.any((left < 0) & (right != np.round(right))):
        raise DomainError(serialize(node), "negative base with non-integer exponent")
    if np.any((left == 0) & (right < 0)):
        raise DomainError(serialize(node), "zero raised to a negative power")
    return np.power(left, right)


# --------------------------------------------------------------------------
# coefficient types


class Coefficient:
    """A real function of x, periodic with period ``period``.

    Subclasses implement ``_values(x)`` for float arrays; calling the object
    accepts scalars or arrays.  Arithmetic between coefficients (and numbers)
    builds composite coefficients evaluated pointwise.
    """

    period = 1.0

    def _values(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self._values(np.atleast_1d(arr)), dtype=float)
        if out.shape != np.atleast_1d(arr).shape:
            out = np.broadcast_to(out, np.atleast_1d(arr).shape).copy()
        if not np.all(np.isfinite(out)):
            raise DomainError(repr(self), "non-finite value")
        return float(out[0]) if arr.ndim == 0 else out

    def _combine(self, other, op, swap=False):
        other = as_coefficient(other)
        operands = (other, self) if swap else (self, other)
        return _Composite(op, operands)

    def __add__(self, other):
        return self._combine(other, "+")

    def __radd__(self, other):
        return self._combine(other, "+", swap=True)

    def __sub__(self, other):
        return self._combine(other, "-")

    def __rsub__(self, other):
        return self._combine(other, "-", swap=True)

    def __mul__(self, other):
        return self._combine(other, "*")

    def __rmul__(self, other):
        return self._combine(other, "*", swap=True)

    def __truediv__(self, other):
        return self._combine(other, "/")

    def __pow__(self, other):
        return self._combine(other, "^")

    def __neg__(self):
        return _Composite("neg", (self,))


class Constant(Coefficient):
    def __init__(self, value: float):
        self.value = float(value)

    def _values(self, x):
        return np.full_like(x, self.value)

    def __repr__(self):
        return f"Constant({self.value!r})"

    def __eq__(self, other):
        return isinstance(other, Constant) and other.value == self.value

    def __hash__(self):
        return hash(("Constant", self.value))


class CoefficientExpr(Coefficient):
    """Parsed expression in the variable ``x``; ``source`` keeps the input text."""

    def __init__(self, ast: Node, source: str | None = None):
        self.ast = ast
        self.source = source if source is not None else serialize(ast)

    def _values(self, x):
        with np.errstate(over="ignore", invalid="ignore"):
            return _eval(self.ast, x)

    def __repr__(self):
        return f"CoefficientExpr({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, CoefficientExpr) and other.ast == self.ast

    def __hash__(self):
        return hash(self.ast)


class FunctionCoefficient(Coefficient):
    def __init__(self, func: Callable, period: float = 1.0):
        self.func = func
        self.period = float(period)

    def _values(self, x):
        return self.func(x)

    def __repr__(self):
        return f"FunctionCoefficient({getattr(self.func, '__name__', self.func)!r})"


class PiecewiseLinearCoefficient(Coefficient):
    """Linear interpolation of ``values`` at ``breakpoints`` in [0, 1], extended 1-periodically."""

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        if bp.ndim != 1 or bp.shape != vals.shape or bp.size < 2:
            raise ValueError("breakpoints and values must be 1-D sequences of equal length >= 2")
        if bp[0] != 0.0 or bp[-1] != 1.0 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must increase strictly from 0 to 1")
        if vals[0] != vals[-1]:
            raise ValueError("value at 1 must equal value at 0 (periodic continuity)")
        self.breakpoints = bp
        self.values = vals

    def _values(self, x):
        return np.interp(np.mod(x, 1.0), self.breakpoints, self.values)

    def __repr__(self):
        return f"PiecewiseLinearCoefficient({self.breakpoints.tolist()}, {self.values.tolist()})"


class Rescaled(Coefficient):
    """``base(x / L)``: the L-periodic version of a 1-periodic coefficient."""

    def __init__(self, base: Coefficient, L: float):
        self.base = base
        self.L = float(L)
        self.period = base.period * self.L

    def _values(self, x):
        return self.base(x / self.L)

    def __repr__(self):
        return f"Rescaled({self.base!r}, {self.L!r})"


class Derivative(Coefficient):
    """Fourth-order central difference of ``base`` with a fixed step."""

    def __init__(self, base: Coefficient, step: float = 1e-3):
        if isinstance(base, PiecewiseLinearCoefficient):
            raise TypeError("piecewise-linear coefficients have no derivative at breakpoints")
        self.base = base
        self.step = float(step) * base.period
        self.period = base.period

    def _values(self, x):
        h = self.step
        f = self.base
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)

    def __repr__(self):
        return f"Derivative({self.base!r})"


class _Composite(Coefficient):
    _OPS = {
        "+": np.add,
        "-": np.subtract,
        "*": np.multiply,
        "/": np.divide,
        "^": np.power,
    }

    def __init__(self, op, operands):
        self.op = op
        self.operands = operands
        periods = {c.period for c in operands if not isinstance(c, Constant)}
        if len(periods) > 1:
            raise ValueError(f"cannot combine coefficients with periods {sorted(periods)}")
        self.period = periods.pop() if periods else 1.0

    def _values(self, x):
        vals = [c(x) for c in self.operands]
        if self.op == "neg":
            return -vals[0]
        if self.op == "/" and np.any(vals[1] == 0):
            raise DomainError(repr(self), "division by zero")
        return self._OPS[self.op](*vals)

    def __repr__(self):
        if self.op == "neg":
            return f"(-{self.operands[0]!r})"
        return f"({self.operands[0]!r} {self.op} {self.operands[1]!r})"


def parse_expression(src: str) -> CoefficientExpr:
    if not isinstance(src, str) or not src.strip():
        raise ExpressionSyntaxError("empty expression", 0, {"number", "x", "pi", "("})
    return CoefficientExpr(_Parser(src).parse(), src)


def evaluate(c, x):
    """Evaluate a coefficient (or expression text) at a point or array of points."""
    return as_coefficient(c)(x)


def as_coefficient(obj) -> Coefficient:
    if isinstance(obj, Coefficient):
        return obj
    if isinstance(obj, str):
        return parse_expression(obj)
    if isinstance(obj, (int, float, np.integer, np.floating)) and not isinstance(obj, bool):
        return Constant(obj)
    if callable(obj):
        return FunctionCoefficient(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a coefficient")


# --------------------------------------------------------------------------
# grids and sampling


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [a, b].

    Periodic grids hold nodes a + i*h for i = 0..n-1 (the right endpoint is
    the image of the left one); Dirichlet grids hold the n-1 interior nodes.
    """

    n: int
    a: float = 0.0
    b: float = 1.0
    kind: str = "periodic"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"node count must be an integer >= 2, got {self.n}")
        if not self.b > self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")
        if self.kind not in ("periodic", "dirichlet"):
            raise ValueError(f"unknown grid kind {self.kind!r}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def x(self) -> np.ndarray:
        if self.kind == "periodic":
            return self.a + self.h * np.arange(self.n)
        return self.a + self.h * np.arange(1, self.n)

    @property
    def size(self) -> int:
        return self.n if self.kind == "periodic" else self.n - 1

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.n * factor, self.a, self.b, self.kind)


def sample(c, grid: Grid) -> np.ndarray:
    """Node values of ``c`` on ``grid``; arrays of matching length pass through."""
    if isinstance(c, np.ndarray) or (isinstance(c, (list, tuple)) and len(c) == grid.size):
        arr = np.asarray(c, dtype=float)
        if arr.shape != (grid.size,):
            raise ValueError(f"sample vector has shape {arr.shape}, grid needs ({grid.size},)")
        return arr
    return np.asarray(as_coefficient(c)(grid.x), dtype=float)


def mean(c, n: int = 256) -> float:
    """Average of ``c`` over one period by the periodic trapezoid rule."""
    if n < 16:
        raise ValueError("mean needs at least 16 nodes")
    c = as_coefficient(c)
    grid = Grid(n, 0.0, c.period)
    return float(np.mean(sample(c, grid)))


def periodic_derivative(values, h: float) -> np.ndarray:
    """Fourth-order central differences of periodic samples."""
    f = np.asarray(values, dtype=float)
    return (-np.roll(f, -2) + 8 * np.roll(f, -1) - 8 * np.roll(f, 1) + np.roll(f, 2)) / (12 * h)


def derivative(c, step: float = 1e-3) -> Coefficient:
    c = as_coefficient(c)
    if isinstance(c, Constant):
        return Constant(0.0)
    return Derivative(c, step)


def derivative_samples(c, grid: Grid) -> np.ndarray:
    if grid.kind != "periodic":
        raise ValueError("derivative_samples needs a periodic grid")
    return periodic_derivative(sample(c, grid), grid.h)


def antiderivative_samples(c, grid: Grid, closed: bool = False) -> np.ndarray:
    """Cumulative trapezoid integral from node 0.

    With ``closed=True`` the returned vector has n+1 entries, the last one
    being the integral over the whole cell (wrapping back to node 0).
    """
    if grid.kind != "periodic":
        raise ValueError("antiderivative_samples needs a periodic grid")
    f = sample(c, grid)
    out = cumulative_trapezoid(np.append(f, f[0]), dx=grid.h, initial=0.0)
    return out if closed else out[:-1]


def rescale(c, L: float) -> Coefficient:
    if not L > 0:
        raise NonPositivePeriod(f"period must be positive, got {L}")
    return Rescaled(as_coefficient(c), L)


def build_tent_profile(R: float, A: float) -> PiecewiseLinearCoefficient:
    """R on [0, 1/4], linear to A on [1/4, 1/2], A on [1/2, 3/4], linear back to R."""
    return PiecewiseLinearCoefficient([0.0, 0.25, 0.5, 0.75, 1.0], [R, R, A, A, R])
