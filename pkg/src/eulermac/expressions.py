"""Parser for the small function language used on the command line.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | base ('^' integer)?
    base   := number | var | func '(' expr ')' | '(' expr ')'
    var    := 'x' digit+            (x1 .. xn)
    func   := exp | log | sin | cos | sqrt

Numbers are decimal literals and become exact rationals; ``p/q`` is just a
division of two literals and stays exact.  Error offsets are byte offsets into
the UTF-8 encoded source.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class ExpressionSyntaxError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


class ArityError(ParseError):
    pass


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class Expression:
    root: Node
    n: int
    source: str = ""

    def __str__(self):
        return to_source(self.root)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),−]))"
)


def _tokenize(src: str):
    pos = 0
    toks = []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            j = pos
            while src[j].isspace():
                j += 1
            raise ExpressionSyntaxError(f"unexpected character {src[j]!r}", _byte(src, j))
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        if text == "−":
            text = "-"
        toks.append((kind, text, start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


def _byte(src: str, i: int) -> int:
    return len(src[:i].encode("utf-8"))


class _Parser:
    def __init__(self, src: str, n: int):
        self.src = src
        self.n = n
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, cls, msg, tok):
        return cls(msg, _byte(self.src, tok[2]))

    def expect(self, text):
        tok = self.take()
        if tok[1] != text or tok[0] not in ("op",):
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(ExpressionSyntaxError, f"expected {text!r}, found {found}", tok)
        return tok

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(ExpressionSyntaxError, f"unexpected {tok[1]!r}", tok)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            inner = self.factor()
            return Neg(inner) if tok[1] == "-" else inner
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] in ("-", "+"):
                sign = -1 if self.take()[1] == "-" else 1
            etok = self.take()
            if etok[0] != "num" or not etok[1].isdigit():
                found = "end of input" if etok[0] == "end" else repr(etok[1])
                raise self.error(ExpressionSyntaxError, f"exponent must be an integer, found {found}", etok)
            node = Pow(node, sign * int(etok[1]))
        return node

    def base(self) -> Node:
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Const(Fraction(text))
        if kind == "name":
            m = re.fullmatch(r"x(\d+)", text)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n:
                    raise self.error(UnknownIdentifier, f"variable {text} outside x1..x{self.n}", tok)
                return Var(idx - 1)
            if text in FUNCTIONS:
                self.expect("(")
                if self.peek()[1] == ")" and self.peek()[0] == "op":
                    raise self.error(ArityError, f"{text} takes exactly one argument, got 0", self.peek())
                arg = self.expr()
                nxt = self.peek()
                if nxt[0] == "op" and nxt[1] == ",":
                    raise self.error(ArityError, f"{text} takes exactly one argument", nxt)
                self.expect(")")
                return Call(text, arg)
            raise self.error(UnknownIdentifier, f"unknown identifier {text!r}", tok)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(ExpressionSyntaxError, f"unexpected {found}", tok)


def parse_expression(src: str, n: int) -> Expression:
    """Parse ``src`` into an expression over variables ``x1..xn``."""
    if not src or not src.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return Expression(_Parser(src, n).parse(), n, src)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node: Node, prec: int = 0) -> str:
    if isinstance(node, Const):
        v = node.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return f"({s})" if v.denominator != 1 and prec > 0 else s
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg, 3)})"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        s = f"{to_source(node.left, p)} {node.op} {to_source(node.right, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(node, Pow):
        base = to_source(node.base, 4)
        # a factor carries at most one '^'
        if isinstance(node.base, Pow):
            base = f"({base})"
        return f"{base}^{node.exponent}" if node.exponent >= 0 else f"{base}^-{-node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    raise TypeError(node)
