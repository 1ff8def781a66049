"""Expression language for potentials V(x, t) and initial profiles.

Grammar (recursive descent, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'pi' | 'e' | VAR | FUNC '(' expr ')' | '(' expr ')'
    VAR    := 'x' | 'x1' | 'x2' | 'x3' | 't'
    FUNC   := 'sin' | 'cos' | 'exp' | 'sqrt' | 'abs'

'^' is right-associative and binds tighter than unary minus, which binds
tighter than '*' and '/'. 'x' is an alias for 'x1'. Evaluation is
real-valued IEEE-754 double; domain violations (division by zero, sqrt of
a negative, non-integer powers of negatives, overflow to infinity) raise
EvalError instead of returning NaN or Inf.

Compiled fields additionally accept mpmath arguments and then evaluate at
the ambient mpmath precision with the same domain guards. The lattice
oracles rely on this: their extended-precision mode would otherwise lose
everything to double rounding of the samples (see `propagators`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import mpmath

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")

_FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")
_CONSTANTS = {"pi": math.pi, "e": math.e}
_VARIABLES = ("x", "x1", "x2", "x3", "t")
_VAR_INDEX = {"x": 0, "x1": 0, "x2": 1, "x3": 2}


class ParseError(ValueError):
    """Syntax error with the byte offset and the token set expected there."""

    def __init__(self, offset: int, expected: Sequence[str], found: str):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at offset {offset}: found {found}, expected one of: {exp}")


class EvalError(ArithmeticError):
    """Domain violation or non-finite value during evaluation."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' | 'sin' | 'cos' | 'exp' | 'sqrt' | 'abs'
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # '+' | '-' | '*' | '/' | '^'
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[Num, Var, Unary, Binary]


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number' | 'ident' | 'op' | 'end'
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        m = _NUMBER_RE.match(source, i)
        if m:
            tokens.append(_Token("number", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ParseError(i, ["number", "name", "operator"], repr(ch))
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: Sequence[str]):
        tok = self.peek()
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(tok.offset, expected, found)

    def match_op(self, *ops: str) -> str | None:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ops:
            self.advance()
            return tok.text
        return None

    def expr(self) -> Expr:
        node = self.term()
        while (op := self.match_op("+", "-")) is not None:
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while (op := self.match_op("*", "/")) is not None:
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.match_op("-"):
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.match_op("^"):
            return Binary("^", node, self.factor())
        return node

    _ATOM_EXPECTED = ("number", "constant", "variable", "function", "'('", "'-'")

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text in _CONSTANTS:
                return Num(_CONSTANTS[tok.text])
            if tok.text in _VARIABLES:
                return Var(tok.text)
            if tok.text in _FUNCTIONS:
                if self.match_op("(") is None:
                    self.fail(["'('"])
                arg = self.expr()
                if self.match_op(")") is None:
                    self.fail(["')'", "operator"])
                return Unary(tok.text, arg)
            raise ParseError(tok.offset, ["constant", "variable", "function"], repr(tok.text))
        if self.match_op("("):
            node = self.expr()
            if self.match_op(")") is None:
                self.fail(["')'", "operator"])
            return node
        self.fail(self._ATOM_EXPECTED)


def parse(source: str) -> Expr:
    """Parse an expression; raises ParseError with offset on bad input."""
    parser = _Parser(_tokenize(source))
    node = parser.expr()
    if parser.peek().kind != "end":
        parser.fail(["operator", "end of input"])
    return node


def _check_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise EvalError(f"non-finite result from {what}")
    return value


def eval_expr(node: Expr, x: Sequence[float], t: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name == "t":
            return float(t)
        idx = _VAR_INDEX[node.name]
        if idx >= len(x):
            raise EvalError(f"variable {node.name} needs dimension >= {idx + 1}, got {len(x)}")
        return float(x[idx])
    if isinstance(node, Unary):
        v = eval_expr(node.arg, x, t)
        if node.op == "neg":
            return -v
        if node.op == "sqrt":
            if v < 0:
                raise EvalError(f"sqrt of negative value {v}")
            return math.sqrt(v)
        if node.op == "abs":
            return abs(v)
        if node.op == "exp":
            try:
                return _check_finite(math.exp(v), "exp")
            except OverflowError:
                raise EvalError(f"exp overflow for argument {v}") from None
        return _check_finite(getattr(math, node.op)(v), node.op)
    lhs = eval_expr(node.lhs, x, t)
    rhs = eval_expr(node.rhs, x, t)
    if node.op == "+":
        return _check_finite(lhs + rhs, "+")
    if node.op == "-":
        return _check_finite(lhs - rhs, "-")
    if node.op == "*":
        return _check_finite(lhs * rhs, "*")
    if node.op == "/":
        if rhs == 0:
            raise EvalError("division by zero")
        return _check_finite(lhs / rhs, "/")
    # power
    if lhs == 0 and rhs < 0:
        raise EvalError("zero raised to a negative power")
    if lhs < 0 and rhs != int(rhs):
        raise EvalError(f"negative base {lhs} with non-integer exponent {rhs}")
    try:
        return _check_finite(math.pow(lhs, rhs), "^")
    except OverflowError:
        raise EvalError("power overflow") from None


def eval_expr_mp(node: Expr, x: Sequence, t) -> "mpmath.mpf":
    """eval_expr twin operating at the ambient mpmath precision."""
    if isinstance(node, Num):
        return mpmath.mpf(node.value)
    if isinstance(node, Var):
        if node.name == "t":
            return mpmath.mpf(t)
        idx = _VAR_INDEX[node.name]
        if idx >= len(x):
            raise EvalError(f"variable {node.name} needs dimension >= {idx + 1}, got {len(x)}")
        return mpmath.mpf(x[idx])
    if isinstance(node, Unary):
        v = eval_expr_mp(node.arg, x, t)
        if node.op == "neg":
            return -v
        if node.op == "sqrt":
            if v < 0:
                raise EvalError(f"sqrt of negative value {v}")
            return mpmath.sqrt(v)
        if node.op == "abs":
            return abs(v)
        return getattr(mpmath, node.op)(v)
    lhs = eval_expr_mp(node.lhs, x, t)
    rhs = eval_expr_mp(node.rhs, x, t)
    if node.op == "+":
        return lhs + rhs
    if node.op == "-":
        return lhs - rhs
    if node.op == "*":
        return lhs * rhs
    if node.op == "/":
        if rhs == 0:
            raise EvalError("division by zero")
        return lhs / rhs
    if lhs == 0 and rhs < 0:
        raise EvalError("zero raised to a negative power")
    if lhs < 0 and rhs != int(rhs):
        raise EvalError(f"negative base {lhs} with non-integer exponent {rhs}")
    result = mpmath.power(lhs, rhs)
    if not mpmath.isfinite(result):
        raise EvalError("power overflow")
    return result


def pretty(node: Expr) -> str:
    """Render an expression; parse(pretty(e)) is structurally identical to e."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"-({pretty(node.arg)})"
        return f"{node.op}({pretty(node.arg)})"
    return f"({pretty(node.lhs)}){node.op}({pretty(node.rhs)})"


def free_dimension(node: Expr) -> int:
    """Smallest spatial dimension the expression can be evaluated in."""
    if isinstance(node, Num):
        return 0
    if isinstance(node, Var):
        return 0 if node.name == "t" else _VAR_INDEX[node.name] + 1
    if isinstance(node, Unary):
        return free_dimension(node.arg)
    return max(free_dimension(node.lhs), free_dimension(node.rhs))


class PotentialField:
    """Compiled expression evaluated as (x vector, t) -> float."""

    __slots__ = ("expr", "dim", "source")

    def __init__(self, expr: Expr, dim: int, source: str | None = None):
        need = free_dimension(expr)
        if dim < need:
            raise ValueError(f"expression needs dimension >= {need}, got {dim}")
        self.expr = expr
        self.dim = dim
        self.source = source

    def __call__(self, x: Sequence[float], t: float = 0.0) -> float:
        if len(x) != self.dim:
            raise EvalError(f"point has dimension {len(x)}, field expects {self.dim}")
        if any(isinstance(c, mpmath.mpf) for c in x) or isinstance(t, mpmath.mpf):
            return eval_expr_mp(self.expr, x, t)
        return eval_expr(self.expr, x, t)

    def is_zero(self) -> bool:
        return isinstance(self.expr, Num) and self.expr.value == 0.0

    def __repr__(self) -> str:
        src = self.source if self.source is not None else pretty(self.expr)
        return f"PotentialField({src!r}, dim={self.dim})"


def compile_field(source: str, dim: int = 1) -> PotentialField:
    """Parse and wrap an expression as an evaluable field."""
    return PotentialField(parse(source), dim, source=source)
