"""Expression language for natural invariants and its frame DSL.

Frame strings are comma-separated expressions, e.g. ``"Jq(sym), free"``.

Atoms:
  J2q J3q Jq I1quintic I2quintic J1c J2c Jc   catalog invariant of the symbol;
                                              an optional ``(sym)`` suffix is accepted
  free                                        the free term, i.e. the operator applied to 1
  box(e)                                      the operator applied to e
  tresse(e, i)                                derivative of e along the i-th frame slot (1-based)
  x1, u, ...                                  ring variables (coordinates or parameters)
  integers, + - * /, integer powers ^

Inside a frame string, ``tresse`` binds to the entries of that same string
that contain no ``tresse`` themselves. A standalone expression may bind it to
an explicitly passed frame instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..catalog import SHAPES
from ..errors import ParseError

CATALOG_TOKENS = ("J2q", "J3q", "Jq", "I1quintic", "I2quintic", "J1c", "J2c", "Jc")


class Expr:
    """Base node. Subclasses are frozen dataclasses, so nodes hash and compare structurally."""

    def children(self) -> tuple["Expr", ...]:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    def contains_tresse(self) -> bool:
        return any(isinstance(e, Tresse) for e in self.walk())

    def is_natural(self) -> bool:
        """False if the expression refers to coordinates directly."""
        return not any(isinstance(e, Var) and e.coordinate for e in self.walk())

    # operator sugar so tests can build expressions directly
    def __add__(self, o):
        return BinOp("+", self, _wrap(o))

    def __radd__(self, o):
        return BinOp("+", _wrap(o), self)

    def __sub__(self, o):
        return BinOp("-", self, _wrap(o))

    def __rsub__(self, o):
        return BinOp("-", _wrap(o), self)

    def __mul__(self, o):
        return BinOp("*", self, _wrap(o))

    def __rmul__(self, o):
        return BinOp("*", _wrap(o), self)

    def __truediv__(self, o):
        return BinOp("/", self, _wrap(o))

    def __rtruediv__(self, o):
        return BinOp("/", _wrap(o), self)

    def __pow__(self, e: int):
        return Pow(self, int(e))

    def __neg__(self):
        return Neg(self)


def _wrap(v) -> Expr:
    return v if isinstance(v, Expr) else Const(Fraction(v))


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: Fraction

    def __str__(self):
        v = Fraction(self.value)
        return str(v) if v >= 0 else f"({v})"


@dataclass(frozen=True, eq=True)
class Var(Expr):
    """A ring variable; ``coordinate`` marks base coordinates (not natural)."""

    name: str
    coordinate: bool = True

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class CatalogInv(Expr):
    name: str

    def __post_init__(self):
        if self.name not in CATALOG_TOKENS:
            raise ValueError(f"unknown catalog invariant {self.name!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return SHAPES[self.name]

    def __str__(self):
        return f"{self.name}(sym)"


@dataclass(frozen=True, eq=True)
class FreeTerm(Expr):
    def __str__(self):
        return "free"


@dataclass(frozen=True, eq=True)
class BoxApply(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"box({self.arg})"


@dataclass(frozen=True, eq=True)
class Tresse(Expr):
    arg: Expr
    slot: int  # 0-based
    frame: tuple[Expr, ...] | None = None

    def children(self):
        return (self.arg,) + (self.frame or ())

    def __str__(self):
        return f"tresse({self.arg}, {self.slot + 1})"


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exp: int

    def children(self):
        return (self.base,)

    def __str__(self):
        return f"{self.base}^{self.exp}" if self.exp >= 0 else f"{self.base}^({self.exp})"


def frame_to_str(frame: Sequence[Expr]) -> str:
    return ", ".join(str(e) for e in frame)


# -- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            out.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            out.append(("op", ch, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, coords: Sequence[str], params: Sequence[str]):
        self.text = text
        self.coords = tuple(coords)
        self.params = tuple(params)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos, self.text)

    def error(self, msg):
        raise ParseError(msg, self.peek()[2], self.text)

    def frame(self) -> list[Expr]:
        items = [self.expr()]
        while self.peek()[1] == ",":
            self.take()
            items.append(self.expr())
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return items

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Pow(base, self.signed_int())

        return base

    def signed_int(self) -> int:
        sign = 1
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, v, pos = self.take()
        if kind != "int":
            raise ParseError("exponent must be an integer", pos, self.text)
        if paren:
            self.expect(")")
        return sign * int(v)

    def atom(self) -> Expr:
        kind, v, pos = self.take()
        if kind == "int":
            return Const(Fraction(int(v)))
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind != "name":
            raise ParseError(f"unexpected {v or 'end of input'!r}", pos, self.text)
        if v in CATALOG_TOKENS:
            if self.peek()[1] == "(":
                self.take()
                kind2, arg, pos2 = self.take()
                if arg != "sym":
                    raise ParseError("catalog invariants only take the argument 'sym'", pos2, self.text)
                self.expect(")")
            return CatalogInv(v)
        if v == "free":
            return FreeTerm()
        if v == "box":
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return BoxApply(node)
        if v == "tresse":
            self.expect("(")
            node = self.expr()
            self.expect(",")
            k, idx, p = self.take()
            if k != "int" or int(idx) < 1:
                raise ParseError("tresse slot must be a positive integer", p, self.text)
            self.expect(")")
            return Tresse(node, int(idx) - 1)
        if v in self.coords:
            return Var(v, coordinate=True)
        if v in self.params:
            return Var(v, coordinate=False)
        raise ParseError(f"unknown name {v!r}", pos, self.text)


def _bind(e: Expr, frame: tuple[Expr, ...]) -> Expr:
    if isinstance(e, Tresse):
        return Tresse(_bind(e.arg, frame), e.slot, e.frame if e.frame is not None else frame)
    if isinstance(e, BoxApply):
        return BoxApply(_bind(e.arg, frame))
    if isinstance(e, BinOp):
        return BinOp(e.op, _bind(e.left, frame), _bind(e.right, frame))
    if isinstance(e, Neg):
        return Neg(_bind(e.arg, frame))
    if isinstance(e, Pow):
        return Pow(_bind(e.base, frame), e.exp)
    return e


def parse_frame(text: str, coords: Sequence[str] = (), params: Sequence[str] = ()) -> tuple[Expr, ...]:
    items = _Parser(text, coords, params).frame()
    base = tuple(e for e in items if not e.contains_tresse())
    if len(base) != len(items) and not base:
        raise ParseError("tresse needs at least one frame entry without tresse", 0, text)
    return tuple(_bind(e, base) for e in items)


def parse_invariant(text: str, coords: Sequence[str] = (), params: Sequence[str] = (), frame: Sequence[Expr] | None = None) -> Expr:
    p = _Parser(text, coords, params)
    e = p.expr()
    if p.peek()[0] != "end":
        p.error(f"unexpected {p.peek()[1]!r}")
    if e.contains_tresse():
        if frame is None:
            raise ParseError("tresse used without a frame", 0, text)
        e = _bind(e, tuple(frame))
    return e
