"""Recursive-descent parser for exact trig-polynomial and Laurent expressions.

Grammar::

    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := atom ["^" ["-"] int]
    atom   := number | "e(" freq ")" | "(" expr ")" | name
    number := int ["/" int] ["i"]

Numbers with an ``i`` suffix are imaginary, so ``(1-2/3i)`` is a complex literal.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Mapping

from .freqmod import FrequencyError, GeneratorTable, freq_parse
from .torus import LaurentPoly
from .trigpoly import CRational, TrigPoly


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?i?)|(?P<exp>e\()|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    toks = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "exp":
            close = text.find(")", m.end())
            if close < 0:
                raise ParseError("unclosed e(", start)
            toks.append(("exp", text[m.end():close], start))
            pos = close + 1
            continue
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, constant: Callable, exp: Callable, name: Callable):
        self.toks = _tokenize(text)
        self.i = 0
        self.constant = constant
        self.exp = exp
        self.name = name

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val: str):
        kind, v, pos = self.take()
        if v != val:
            raise ParseError(f"expected {val!r}, found {v or 'end of input'!r}", pos)

    def parse(self):
        value = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", pos)
        return value

    def expr(self):
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[1] == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            kind, v, pos = self.take()
            if kind != "num" or "/" in v or v.endswith("i"):
                raise ParseError("exponent must be an integer", pos)
            n = -int(v) if neg else int(v)
            try:
                base = base**n
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(str(exc), pos) from None
        return base

    def atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            imag = v.endswith("i")
            body = v[:-1] if imag else v
            try:
                q = Fraction(body)
            except ZeroDivisionError:
                raise ParseError(f"zero denominator in {v!r}", pos) from None
            return self.constant(CRational(Fraction(0), q) if imag else CRational(q))
        if kind == "exp":
            try:
                return self.exp(v)
            except FrequencyError as exc:
                raise ParseError(str(exc), pos) from None
        if kind == "name":
            try:
                return self.name(v)
            except KeyError:
                raise ParseError(f"unknown name {v!r}", pos) from None
        if v == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)


def parse_expr(text: str, table: GeneratorTable, names: Mapping[str, TrigPoly] | None = None) -> TrigPoly:
    """Parse a trig-polynomial expression exactly; ``e(λ)`` is e^{iλt}.

    >>> from apalgebra.freqmod import default_table
    >>> parse_expr("e(w1)*e(-w1)", default_table(2)).render()
    '1'
    """
    names = names or {}

    def name(n):
        if n in names:
            return names[n]
        if n == "i":
            return TrigPoly.constant(CRational(Fraction(0), Fraction(1)), table)
        raise KeyError(n)

    return _Parser(
        text,
        constant=lambda c: TrigPoly.constant(c, table),
        exp=lambda f: TrigPoly.exp(freq_parse(f, table)),
        name=name,
    ).parse()


def parse_laurent(text: str, dim: int, var: str = "z") -> LaurentPoly:
    """Parse a Laurent polynomial in variables ``z1 … z{dim}`` (e.g. ``1/2*z1*z3^-1``)."""
    pattern = re.compile(rf"{re.escape(var)}(\d+)")

    def name(n):
        m = pattern.fullmatch(n)
        if m and 1 <= int(m.group(1)) <= dim:
            return LaurentPoly.variable(dim, int(m.group(1)) - 1)
        if n == "i":
            return LaurentPoly.constant(dim, CRational(Fraction(0), Fraction(1)))
        raise KeyError(n)

    def exp(_):
        raise FrequencyError("e(...) is not available in Laurent expressions")

    return _Parser(text, constant=lambda c: LaurentPoly.constant(dim, c), exp=exp, name=name).parse()
