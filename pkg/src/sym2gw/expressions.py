"""A small recursive-descent parser for class expressions.

Identifiers: ``a`` (alpha), ``b`` (beta), ``g``/``g0``, ``g1``, ``g2`` on
the orbifold side; ``T1``, ``T2`` on the Hilbert side; ``i`` for the
imaginary unit. Scalars are integers or ``p/q`` literals. Operators are
``+ - * ^`` with the usual precedence, plus parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .chow_rings import (
    ALPHA, BETA, GAMMA0, GAMMA1, GAMMA2, T1, T2, HilbClass, OrbClass,
)
from .exact_arith import I, GaussRational, to_gauss

__all__ = ["ExpressionError", "parse_class", "parse_insertions", "Value"]

Value = Union[GaussRational, OrbClass, HilbClass]

_IDENTS: dict[str, Value] = {
    "a": ALPHA,
    "b": BETA,
    "g": GAMMA0,
    "g0": GAMMA0,
    "g1": GAMMA1,
    "g2": GAMMA2,
    "T1": T1.normal_form(),
    "T2": T2.normal_form(),
    "i": I,
}

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class ExpressionError(ValueError):
    """Parse failure, with the 0-based character position of the problem."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str, offset: int = 0) -> list[_Tok]:
    out: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace is left
            break
        start = m.start(m.lastindex) + offset
        num, ident, op = m.groups()
        if num is not None:
            out.append(_Tok("num", num, start))
        elif ident is not None:
            if ident not in _IDENTS:
                raise ExpressionError(f"unknown identifier {ident!r}", start, text)
            out.append(_Tok("ident", ident, start))
        else:
            if op not in "+-*^()":
                raise ExpressionError(f"unexpected character {op!r}", start, text)
            out.append(_Tok("op", op, start))
        pos = m.end()
    out.append(_Tok("end", "", len(text) + offset))
    return out


def _kind(v: Value) -> str:
    if isinstance(v, OrbClass):
        return "orb"
    if isinstance(v, HilbClass):
        return "hilb"
    return "scalar"


def _combine(x: Value, y: Value, op: str, pos: int, text: str) -> Value:
    kx, ky = _kind(x), _kind(y)
    if "orb" in (kx, ky) and "hilb" in (kx, ky):
        raise ExpressionError("cannot mix orbifold and Hilbert scheme classes", pos, text)
    if op in "+-" and kx != ky and "scalar" in (kx, ky):
        # scalars embed as multiples of the unit class
        if kx == "scalar":
            x = OrbClass.scalar(x) if ky == "orb" else HilbClass([x] + [0] * 8)
        else:
            y = OrbClass.scalar(y) if kx == "orb" else HilbClass([y] + [0] * 8)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if kx == "scalar" and ky != "scalar":
        return y * x
    return x * y


class _Parser:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.toks = _tokenize(text, offset)
        self.k = 0

    def peek(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None) -> ExpressionError:
        tok = tok or self.peek()
        return ExpressionError(msg, tok.pos, self.text)

    def parse(self) -> Value:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        v = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return v

    def expr(self) -> Value:
        v = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take()
            v = _combine(v, self.term(), op.text, op.pos, self.text)
        return v

    def term(self) -> Value:
        v = self.unary()
        while self.peek().kind == "op" and self.peek().text == "*":
            op = self.take()
            v = _combine(v, self.unary(), "*", op.pos, self.text)
        return v

    def unary(self) -> Value:
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.take()
            v = self.unary()
            return v if t.text == "+" else -v
        return self.power()

    def power(self) -> Value:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "num" or "/" in t.text:
                raise self.error("exponent must be a nonnegative integer", t)
            k = int(t.text)
            out: Value = base
            if k == 0:
                kind = _kind(base)
                if kind == "orb":
                    return OrbClass.scalar(1)
                if kind == "hilb":
                    return HilbClass([1] + [0] * 8)
                return to_gauss(1)
            for _ in range(k - 1):
                out = out * base
            return out
        return base

    def atom(self) -> Value:
        t = self.take()
        if t.kind == "num":
            return to_gauss(Fraction(t.text))
        if t.kind == "ident":
            return _IDENTS[t.text]
        if t.kind == "op" and t.text == "(":
            v = self.expr()
            close = self.take()
            if close.kind != "op" or close.text != ")":
                raise self.error("expected ')'", close)
            return v
        if t.kind == "end":
            raise self.error("unexpected end of expression", t)
        raise self.error(f"unexpected {t.text!r}", t)


def parse_class(text: str) -> Value:
    """Parse one expression into a scalar, an OrbClass or a HilbClass."""
    return _Parser(text).parse()


def _split_top_level(text: str) -> list[tuple[str, int]]:
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:k], start))
            start = k + 1
    parts.append((text[start:], start))
    return parts


def parse_insertions(text: str) -> list[OrbClass]:
    """Parse a comma separated list of orbifold classes, e.g. ``"a^4, a^2"``."""
    out: list[OrbClass] = []
    if not text.strip():
        return out
    for piece, offset in _split_top_level(text):
        p = _Parser(piece, offset)
        p.text = text
        v = p.parse()
        if isinstance(v, HilbClass):
            raise ExpressionError("insertions must be orbifold classes", offset, text)
        out.append(v if isinstance(v, OrbClass) else OrbClass.scalar(v))
    return out
