"""A small arithmetic language for the nonlinearities f(r, u, v, gu, gv).

Grammar, lowest precedence first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' power)?          # right-associative
    primary := NUMBER | CONST | VAR | FUNC '(' args ')' | '(' expr ')'

The right operand of ``^`` is a ``power``, so ``u^-2`` is rejected; write
``u^(-2)``.  Expressions compile to closures that work elementwise on numpy
arrays as well as on plain floats.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "ArityError",
    "BinOp",
    "Call",
    "Const",
    "EvalError",
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "FUNCTIONS",
    "Neg",
    "Num",
    "UnknownIdentifierError",
    "VARIABLES",
    "Var",
    "evaluate",
    "parse",
    "to_source",
]

VARIABLES = ("r", "u", "v", "gu", "gv")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = {
    "exp": 1, "log": 1, "sqrt": 1, "abs": 1, "sin": 1, "cos": 1, "tan": 1,
    "sinh": 1, "cosh": 1, "min": 2, "max": 2, "pow": 2,
}
MAX_INT_POWER = 16


class ExprError(ValueError):
    """Base class for parse errors; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        if expected:
            message = f"{message}; expected one of {', '.join(sorted(expected))}"
        super().__init__(message, offset)
        self.expected = expected


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


class ArityError(ExprError):
    def __init__(self, name: str, want: int, got: int, offset: int):
        super().__init__(f"{name}() takes {want} argument(s), got {got}", offset)
        self.name = name


class EvalError(ArithmeticError):
    """Out-of-domain operation or non-finite value during evaluation."""


# --------------------------------------------------------------------------- AST


class Expr:
    """Base class of expression nodes."""

    @cached_property
    def fn(self) -> Callable[[dict], object]:
        return _compile(self)

    def __call__(self, r=0.0, u=0.0, v=0.0, gu=0.0, gv=0.0):
        return evaluate(self, r, u, v, gu, gv)

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Const(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    args: tuple[Expr, ...]


# ------------------------------------------------------------------------ parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

_PRIMARY_START = frozenset({"number", "identifier", "'('"})


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'ident', 'op', 'end'
    text: str
    pos: int  # character index


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = self._tokenize(source)
        self.i = 0

    def _byte(self, pos: int) -> int:
        return len(self.source[:pos].encode("utf-8"))

    def _tokenize(self, src: str) -> list[_Token]:
        out, pos = [], 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None:
                raise ExprSyntaxError(
                    f"unexpected character {src[pos]!r}", self._byte(pos),
                    _PRIMARY_START | {"operator"},
                )
            kind = m.lastgroup
            if kind != "ws":
                out.append(_Token(kind, m.group(), pos))
            pos = m.end()
        out.append(_Token("end", "", len(src)))
        return out

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _fail(self, expected) -> None:
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}", self._byte(t.pos), frozenset(expected))

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            self._fail(_PRIMARY_START | {"'-'"})
        node = self.expr()
        if self.tok.kind != "end":
            self._fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self._accept("^"):
            return BinOp("^", base, self.power())
        return base

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            value = float(t.text)
            if not math.isfinite(value):
                raise ExprSyntaxError("numeric literal overflows", self._byte(t.pos), frozenset())
            return Num(value)
        if t.kind == "ident":
            self.i += 1
            name = t.text
            if name in FUNCTIONS:
                if not self._accept("("):
                    self._fail({"'('"})
                args = [self.expr()]
                while self._accept(","):
                    args.append(self.expr())
                if not self._accept(")"):
                    self._fail({"','", "')'"})
                if len(args) != FUNCTIONS[name]:
                    raise ArityError(name, FUNCTIONS[name], len(args), self._byte(t.pos))
                return Call(name, tuple(args))
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Const(name)
            raise UnknownIdentifierError(name, self._byte(t.pos))
        if self._accept("("):
            node = self.expr()
            if not self._accept(")"):
                self._fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
            return node
        self._fail(_PRIMARY_START)
        raise AssertionError("unreachable")


def parse(source: str) -> Expr:
    """Parse expression text into a tree."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return _Parser(source).parse()


def to_source(node: Expr) -> str:
    """Fully parenthesized text that parses back to an identical tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


# -------------------------------------------------------------------- evaluation


def _fail_where(mask, message: str):
    if np.ndim(mask) == 0:
        raise EvalError(message)
    idx = np.unravel_index(int(np.argmax(mask)), np.shape(mask))
    raise EvalError(f"{message} (first at index {tuple(int(i) for i in idx)})")


def _div(a, b):
    bad = np.asarray(b) == 0
    if np.any(bad):
        _fail_where(bad, "division by zero")
    return a / b


def _log(a):
    bad = np.asarray(a) <= 0
    if np.any(bad):
        _fail_where(bad, "log of non-positive argument")
    return np.log(a)


def _sqrt(a):
    bad = np.asarray(a) < 0
    if np.any(bad):
        _fail_where(bad, "sqrt of negative argument")
    return np.sqrt(a)


def _int_power(a, n: int):
    if n == 0:
        return np.ones_like(a) if np.ndim(a) else 1.0
    res = a
    for _ in range(abs(n) - 1):
        res = res * a
    return _div(1.0, res) if n < 0 else res


def _real_power(a, b):
    a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    neg = a_arr < 0
    zero_bad = (a_arr == 0) & (b_arr <= 0)
    if np.any(neg):
        _fail_where(neg, "non-integer power of negative base")
    if np.any(zero_bad):
        _fail_where(zero_bad, "zero raised to non-positive power")
    safe = np.where(a_arr > 0, a_arr, 1.0)
    res = np.where(a_arr > 0, np.exp(b_arr * np.log(safe)), 0.0)
    return res if res.ndim else float(res)


def _power(a, b):
    b_arr = np.asarray(b, dtype=float)
    is_int = (b_arr == np.round(b_arr)) & (np.abs(b_arr) <= MAX_INT_POWER)
    if np.all(is_int):
        if b_arr.ndim == 0:
            return _int_power(a, int(b_arr))
        zero_bad = (np.asarray(a) == 0) & (b_arr < 0)
        if np.any(zero_bad):
            _fail_where(zero_bad, "division by zero")
        return np.power(np.asarray(a, dtype=float), b_arr)
    if np.any(is_int):
        a_arr = np.broadcast_to(np.asarray(a, dtype=float), np.broadcast(a, b_arr).shape)
        b_full = np.broadcast_to(b_arr, a_arr.shape)
        mask = np.broadcast_to(is_int, a_arr.shape)
        out = np.empty(a_arr.shape)
        out[mask] = _power(a_arr[mask], b_full[mask])
        out[~mask] = _real_power(a_arr[~mask], b_full[~mask])
        return out
    return _real_power(a, b)


_UNARY = {
    "exp": np.exp, "log": _log, "sqrt": _sqrt, "abs": np.abs, "sin": np.sin,
    "cos": np.cos, "tan": np.tan, "sinh": np.sinh, "cosh": np.cosh,
}
_BINARY_FUNCS = {"min": np.minimum, "max": np.maximum, "pow": _power}


def _compile(node: Expr) -> Callable[[dict], object]:
    if isinstance(node, Num):
        value = node.value
        return lambda env: value
    if isinstance(node, Const):
        value = CONSTANTS[node.name]
        return lambda env: value
    if isinstance(node, Var):
        name = node.name
        return lambda env: env[name]
    if isinstance(node, Neg):
        inner = node.operand.fn
        return lambda env: -inner(env)
    if isinstance(node, BinOp):
        lf, rf = node.left.fn, node.right.fn
        if node.op == "+":
            return lambda env: lf(env) + rf(env)
        if node.op == "-":
            return lambda env: lf(env) - rf(env)
        if node.op == "*":
            return lambda env: lf(env) * rf(env)
        if node.op == "/":
            return lambda env: _div(lf(env), rf(env))
        if isinstance(node.right, Num) and node.right.value == round(node.right.value) \
                and abs(node.right.value) <= MAX_INT_POWER:
            n = int(node.right.value)
            return lambda env: _int_power(lf(env), n)
        return lambda env: _power(lf(env), rf(env))
    if isinstance(node, Call):
        fns = [a.fn for a in node.args]
        if len(fns) == 1:
            f, (a,) = _UNARY[node.func], fns
            return lambda env: f(a(env))
        f, (a, b) = _BINARY_FUNCS[node.func], fns
        return lambda env: f(a(env), b(env))
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(expr: Expr, r=0.0, u=0.0, v=0.0, gu=0.0, gv=0.0):
    """Evaluate ``expr``; arguments may be floats or broadcastable arrays."""
    env = {"r": r, "u": u, "v": v, "gu": gu, "gv": gv}
    with np.errstate(all="ignore"):
        res = expr.fn(env)
    shape = np.broadcast(r, u, v, gu, gv).shape
    if shape:
        res = np.broadcast_to(np.asarray(res, dtype=float), shape)
        bad = ~np.isfinite(res)
        if np.any(bad):
            _fail_where(bad, "non-finite result")
        return res
    res = float(res)
    if not math.isfinite(res):
        raise EvalError("non-finite result")
    return res
