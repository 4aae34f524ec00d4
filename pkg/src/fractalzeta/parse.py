"""Recursive-descent parser for the expression mini-language.

    expr    := atom | "union(" expr (";" expr)* ")" | "tensor(" expr (";" expr)* ")"
             | "scale:" num "(" expr ")" | "power:" int "(" expr ")"
             | "lift:" family "(" expr ")"
    atom    := "cantor" | "unit" | "gencantor:" int "," num | "inforder:" int "," num
             | "selfsim:" num ("," num)* | "explicit:" len ("," len)*
             | "prescribed:" num "," num "," num
    len     := num ["*" int]          (length with multiplicity)
    num     := decimal | decimal "/" decimal
    family  := exp | expm1 | geometric | log | cosh | sinh

    set     := "realization:" expr | "cantorset:" int "," num
             | "grill:" int "(" set ")" | "flat:" int "(" set ")"
             | "union(" set (";" set)* ")" | "prescribed:" num "," num "," num "," int

Whitespace is ignored.  Numbers may be written as fractions, e.g. ``1/3``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ConstructionError
from .strings import (
    UNIT,
    Explicit,
    GenCantor,
    InfiniteOrder,
    LengthTerm,
    Power,
    SelfSimilar,
    StringExpr,
    Tensor,
    Union,
    _FAMILIES,
    cantor_string,
    lift,
    scale,
)

__all__ = ["ParseError", "parse_expr", "parse_set", "parse_complex"]

_WORD = re.compile(r"[a-z_][a-z0-9_]*")
_NUM = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class ParseError(ConstructionError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.src = text
        self.s = "".join(text.split())
        self.i = 0

    def fail(self, what: str):
        raise ParseError(f"{what} at position {self.i} in {self.src!r}")

    def peek_word(self) -> str:
        m = _WORD.match(self.s, self.i)
        return m.group(0) if m else ""

    def word(self) -> str:
        w = self.peek_word()
        if not w:
            self.fail("expected a keyword")
        self.i += len(w)
        return w

    def eat(self, ch: str):
        if not self.s.startswith(ch, self.i):
            self.fail(f"expected {ch!r}")
        self.i += len(ch)

    def maybe(self, ch: str) -> bool:
        if self.s.startswith(ch, self.i):
            self.i += len(ch)
            return True
        return False

    def decimal(self) -> str:
        m = _NUM.match(self.s, self.i)
        if not m:
            self.fail("expected a number")
        self.i = m.end()
        return m.group(0)

    def num(self) -> float:
        a = self.decimal()
        if self.maybe("/"):
            b = self.decimal()
            if float(b) == 0:
                self.fail("division by zero")
            return float(Fraction(a) / Fraction(b))
        return float(a)

    def int_(self) -> int:
        x = self.num()
        if x != int(x):
            self.fail("expected an integer")
        return int(x)

    def nums(self) -> list[float]:
        out = [self.num()]
        while self.maybe(","):
            out.append(self.num())
        return out

    def done(self):
        if self.i != len(self.s):
            self.fail("unexpected trailing input")

    # -- strings

    def expr(self) -> StringExpr:
        w = self.word()
        if w in ("union", "tensor"):
            self.eat("(")
            parts = [self.expr()]
            while self.maybe(";"):
                parts.append(self.expr())
            self.eat(")")
            return Union(tuple(parts)) if w == "union" else Tensor(tuple(parts))
        if w == "cantor":
            return cantor_string()
        if w == "unit":
            return UNIT
        self.eat(":")
        if w in ("gencantor", "inforder"):
            m = self.int_()
            self.eat(",")
            a = self.num()
            return GenCantor(m, a) if w == "gencantor" else InfiniteOrder(m, a)
        if w == "selfsim":
            return SelfSimilar(tuple(self.nums()))
        if w == "explicit":
            terms = [self.length()]
            while self.maybe(","):
                terms.append(self.length())
            return Explicit(tuple(terms))
        if w == "prescribed":
            from .prescriber import construct

            d_inf, d1, d = self.nums_exact(3)
            return construct(d_inf, d1, d).expr
        if w == "scale":
            g = self.num()
            return scale(g, self.paren(self.expr))
        if w == "power":
            n = self.int_()
            return Power(self.paren(self.expr), n)
        if w == "lift":
            name = self.word()
            if name not in _FAMILIES:
                self.fail(f"unknown lift family {name!r}")
            return lift(_FAMILIES[name], self.paren(self.expr))
        self.fail(f"unknown expression {w!r}")

    def length(self) -> LengthTerm:
        x = self.num()
        k = self.int_() if self.maybe("*") else 1
        return LengthTerm(x, k)

    def nums_exact(self, k: int) -> list[float]:
        v = self.nums()
        if len(v) != k:
            self.fail(f"expected {k} numbers")
        return v

    def paren(self, f):
        self.eat("(")
        out = f()
        self.eat(")")
        return out

    # -- sets

    def set_(self):
        from . import distance as dz

        w = self.word()
        if w == "union":
            self.eat("(")
            parts = [self.set_()]
            while self.maybe(";"):
                parts.append(self.set_())
            self.eat(")")
            return dz.UnionSet(parts)
        self.eat(":")
        if w == "realization":
            return dz.Realization(self.expr())
        if w == "cantorset":
            m = self.int_()
            self.eat(",")
            return dz.GenCantorSet(m, self.num())
        if w in ("grill", "flat"):
            k = self.int_()
            inner = self.paren(self.set_)
            return dz.Grill(inner, k) if w == "grill" else dz.EmbeddedFlat(inner, k)
        if w == "prescribed":
            d_inf, d1, d, n = self.nums_exact(4)
            if n != int(n):
                self.fail("ambient dimension must be an integer")
            return dz.construct_set(d_inf, d1, d, int(n))
        self.fail(f"unknown set {w!r}")


def parse_expr(text: str) -> StringExpr:
    p = _Parser(text)
    e = p.expr()
    p.done()
    return e


def parse_set(text: str):
    p = _Parser(text)
    A = p.set_()
    p.done()
    return A


def parse_complex(text: str) -> complex:
    """``1+2i``, ``0.5-3j``, ``2``, ``-1.5i``."""
    t = "".join(text.split()).replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ParseError(f"cannot read {text!r} as a complex number") from None
