"""Small arithmetic language for user-supplied cavity mode functions.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right associative
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are ``z``, ``pi`` and ``L``; functions are listed in ``FUNCTIONS``.
Trees are frozen dataclasses, so they hash and compare structurally.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExpressionEvalError, ExpressionSyntaxError, UnknownIdentifierError

NAMES = ("z", "pi", "L")
FUNCTIONS = ("sin", "cos", "exp", "sech", "tanh", "abs", "sqrt")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Name, Neg, BinOp, Call]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos,
                                        {"number", "identifier", "("})
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value, expected):
        kind, text, pos = self.peek()
        if text != value or kind == "end":
            got = "end of input" if kind == "end" else repr(text)
            raise ExpressionSyntaxError(f"unexpected {got}", pos, expected)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {text!r}", pos,
                                        {"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Const(float(text))
        if kind == "name":
            self.advance()
            if text in FUNCTIONS:
                self.expect("(", {"("})
                arg = self.expr()
                self.expect(")", {")", "+", "-", "*", "/", "^"})
                return Call(text, arg)
            if text in NAMES:
                return Name(text)
            raise UnknownIdentifierError(text, pos)
        if (kind, text) == ("op", "("):
            self.advance()
            node = self.expr()
            self.expect(")", {")", "+", "-", "*", "/", "^"})
            return node
        got = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {got}", pos,
                                    {"number", "identifier", "(", "-"})


def parse_profile_expr(text: str) -> Node:
    """Parse ``text`` into an expression tree.

    Raises ``ExpressionSyntaxError`` (with ``offset`` and ``expected``) on
    malformed input and ``UnknownIdentifierError`` on names outside
    ``NAMES``/``FUNCTIONS``.
    """
    return _Parser(text).parse()


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def to_text(node: Node) -> str:
    """Canonical printer; ``parse_profile_expr(to_text(t)) == t``."""
    if isinstance(node, Const):
        return repr(float(node.value))
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) < _NEG_PREC:
            inner = f"({inner})"
        return "-" + inner
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        # the exponent is parsed as a unary, so Neg needs no parentheses there
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _NEG_PREC:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def _first_bad(z, mask):
    idx = np.flatnonzero(np.broadcast_to(mask, np.shape(z)))
    return float(np.ravel(z)[idx[0]]) if idx.size else None


def evaluate(node: Node, z, L: float):
    """Evaluate ``node`` at the positions ``z`` (scalar or array)."""
    z = np.asarray(z, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(node, z, float(L))
    out = np.broadcast_to(np.asarray(out, dtype=float), z.shape)
    bad = ~np.isfinite(out)
    if bad.any():
        raise ExpressionEvalError("non-finite value", _first_bad(z, bad))
    return out


def _eval(node, z, L):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Name):
        if node.id == "z":
            return z
        return math.pi if node.id == "pi" else L
    if isinstance(node, Neg):
        return -_eval(node.operand, z, L)
    if isinstance(node, Call):
        x = _eval(node.arg, z, L)
        if node.func == "sqrt":
            neg = np.asarray(x) < 0
            if neg.any():
                raise ExpressionEvalError("sqrt of negative value", _first_bad(z, neg))
            return np.sqrt(x)
        if node.func == "sech":
            return 1.0 / np.cosh(x)
        return getattr(np, node.func)(x)
    a = _eval(node.left, z, L)
    b = _eval(node.right, z, L)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        zero = np.asarray(b) == 0
        if zero.any():
            raise ExpressionEvalError("division by zero", _first_bad(z, zero))
        return a / b
    return np.power(a, b)
