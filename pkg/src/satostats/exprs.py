"""Mini-grammar for virtual-character expressions.

Accepted atoms: integer scalars, the coefficient characters a1 and a2,
power sums s<n>, and irreducible labels (chi_<n>, chi_{m,n}, nu_<m>,
rho_<m>, chi_<i>xchi_<j>, sign, triv).  Operators: + - * ^ and
parentheses.  Examples: "a1^3", "s5", "a2-1", "2*chi_1 + chi_3".

Expressions evaluate in the exact class-function algebra of the chosen
group, so the result both evaluates pointwise and decomposes exactly.
"""

from __future__ import annotations

import re

from . import chars
from .chars import ClassFunction
from .errors import ParseError
from .stgroup import STGroup

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<label>chi_\{\d+,\d+\}|chi_\d+xchi_\d+|chi_\d+|nu_-?\d+|rho_\d+|sign|triv)
    | (?P<family>a1|a2|s\d+)
    | (?P<int>\d+)
    | (?P<op>[-+*^()])
    )""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot tokenize expression at: {text[pos:]!r}")
        pos = m.end()
        for kind in ("label", "family", "int", "op"):
            if m.group(kind) is not None:
                out.append((kind, m.group(kind)))
                break
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], group: STGroup):
        self.toks = tokens
        self.i = 0
        self.group = group

    def peek(self) -> tuple[str, str]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str]:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self) -> ClassFunction:
        fn = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input at {self.peek()[1]!r}")
        return fn

    def expr(self) -> ClassFunction:
        fn = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            fn = fn + rhs if op == "+" else fn - rhs
        return fn

    def term(self) -> ClassFunction:
        fn = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            fn = fn * self.factor()
        return fn

    def factor(self) -> ClassFunction:
        if self.peek() == ("op", "-"):
            self.take()
            return self.factor() * (-1)
        fn = self.atom()
        while self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer")
            fn = fn ** int(val)
        return fn

    def atom(self) -> ClassFunction:
        kind, val = self.take()
        if kind == "int":
            return ClassFunction.constant(self.group, int(val))
        if kind == "family":
            if val == "a1":
                return chars.moment_function(1, self.group)
            if val == "a2":
                return chars.moment_function(2, self.group)
            return chars.power_sum_function(int(val[1:]), 1, self.group)
        if kind == "label":
            try:
                lab = chars.parse_label(val, self.group)
            except ValueError as exc:
                raise ParseError(str(exc)) from None
            return ClassFunction.from_label(lab)
        if kind == "op" and val == "(":
            fn = self.expr()
            self.expect_op(")")
            return fn
        raise ParseError(f"unexpected token {val!r}")


def parse_char_expr(text: str, group: STGroup) -> ClassFunction:
    """Parse an expression into the exact class-function algebra of group."""
    return _Parser(_tokenize(text), group).parse()
