"""Parser and evaluator for quaternion-valued functions of a real variable t.

Grammar (precedence low to high; no implicit multiplication, "2i" is a
syntax error):

    expr    = term   { ("+" | "-") term } ;
    term    = factor { ("*" | "/") factor } ;
    factor  = "-" factor | power ;
    power   = atom { "^" INTEGER } ;
    atom    = NUMBER | "i" | "j" | "k" | "t"
            | ("exp" | "sin" | "cos") "(" expr ")"
            | "(" expr ")" ;

a / b denotes right division a * b**-1; ^ takes a nonnegative integer
literal and is repeated multiplication of the base; sin and cos accept
only arguments that evaluate to real values at the given t.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .quat import I, J, K, Quaternion, qexp
from .qlinalg import QMatrix


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EvalError(ArithmeticError):
    pass


# -- abstract syntax -------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Basis:
    axis: str  # "i" | "j" | "k"


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Sub:
    a: object
    b: object


@dataclass(frozen=True)
class Mul:
    a: object
    b: object


@dataclass(frozen=True)
class Div:
    a: object
    b: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str  # "exp" | "sin" | "cos"
    arg: object


Expr = (Num, Basis, Var, Neg, Add, Sub, Mul, Div, Pow, Call)

_FUNCTIONS = ("exp", "sin", "cos")
_UNITS = {"i": I, "j": J, "k": K}

_NUM_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPS = "+-*/^()"


def _tokenize(src: str):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        c = src[pos]
        if c.isspace():
            pos += 1
            continue
        m = _NUM_RE.match(src, pos)
        if m:
            tokens.append(("num", float(m.group(0)), pos))
            pos = m.end()
            continue
        m = _NAME_RE.match(src, pos)
        if m:
            tokens.append(("name", m.group(0), pos))
            pos = m.end()
            continue
        if c in _OPS:
            tokens.append(("op", c, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {c!r}", pos)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value, at = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", at)
        return self.advance()

    def parse(self):
        e = self.expr()
        kind, value, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", at)
        return e

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if value == "+" else Sub(node, rhs)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.factor()
                node = Mul(node, rhs) if value == "*" else Div(node, rhs)
            else:
                return node

    def factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        node = self.atom()
        while True:
            kind, value, _ = self.peek()
            if kind != "op" or value != "^":
                return node
            self.advance()
            kind, value, at = self.peek()
            if kind == "op" and value == "-":
                raise ParseError("exponent must be a nonnegative integer", at)
            if kind != "num":
                raise ParseError("exponent must be an integer literal", at)
            if not float(value).is_integer():
                raise ParseError("exponent must be a nonnegative integer", at)
            self.advance()
            node = Pow(node, int(value))

    def atom(self):
        kind, value, at = self.advance()
        if kind == "num":
            return Num(value)
        if kind == "name":
            if value == "t":
                return Var()
            if value in _UNITS:
                return Basis(value)
            if value in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(value, arg)
            raise ParseError(f"unknown identifier {value!r}", at)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", at)
        raise ParseError(f"unexpected token {value!r}", at)


def parse(src: str):
    """Parse an expression string into its AST."""
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return _Parser(src).parse()


# -- evaluation -------------------------------------------------------------


def evaluate(e, t: float) -> Quaternion:
    """Evaluate an expression at real t over quaternion arithmetic."""
    match e:
        case Num(value=v):
            return Quaternion(v)
        case Basis(axis=a):
            return _UNITS[a]
        case Var():
            return Quaternion(t)
        case Neg(arg=a):
            return -evaluate(a, t)
        case Add(a=a, b=b):
            return evaluate(a, t) + evaluate(b, t)
        case Sub(a=a, b=b):
            return evaluate(a, t) - evaluate(b, t)
        case Mul(a=a, b=b):
            return evaluate(a, t) * evaluate(b, t)
        case Div(a=a, b=b):
            return evaluate(a, t) / evaluate(b, t)
        case Pow(base=b, exponent=n):
            base = evaluate(b, t)
            out = Quaternion(1.0)
            for _ in range(n):
                out = out * base
            return out
        case Call(func="exp", arg=a):
            return qexp(evaluate(a, t))
        case Call(func=fn, arg=a):
            q = evaluate(a, t)
            if not q.is_real():
                raise EvalError(f"{fn}() requires a real argument, got {q}")
            return Quaternion(getattr(math, fn)(q.w))
    raise TypeError(f"not an expression node: {e!r}")


def depends_on_t(e) -> bool:
    match e:
        case Var():
            return True
        case Num() | Basis():
            return False
        case Neg(arg=a) | Call(arg=a) | Pow(base=a):
            return depends_on_t(a)
        case Add(a=a, b=b) | Sub(a=a, b=b) | Mul(a=a, b=b) | Div(a=a, b=b):
            return depends_on_t(a) or depends_on_t(b)
    raise TypeError(f"not an expression node: {e!r}")


# -- rendering --------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e) -> int:
    match e:
        case Num(value=v):
            return _PREC_NEG if v < 0 else _PREC_ATOM
        case Basis() | Var() | Call():
            return _PREC_ATOM
        case Pow():
            return _PREC_POW
        case Neg():
            return _PREC_NEG
        case Mul() | Div():
            return _PREC_MUL
        case Add() | Sub():
            return _PREC_ADD
    raise TypeError(f"not an expression node: {e!r}")


def _child(e, own: int, tight: bool) -> str:
    s = render(e)
    if _prec(e) < own or (tight and _prec(e) == own):
        return f"({s})"
    return s


def render(e) -> str:
    """Render an AST back to source; reparsing evaluates identically."""
    match e:
        case Num(value=v):
            if v == int(v) and abs(v) < 1e16:
                return str(int(v))
            return repr(v)
        case Basis(axis=a):
            return a
        case Var():
            return "t"
        case Neg(arg=a):
            return "-" + _child(a, _PREC_NEG, tight=False)
        case Add(a=a, b=b):
            return _child(a, _PREC_ADD, False) + "+" + _child(b, _PREC_ADD, True)
        case Sub(a=a, b=b):
            return _child(a, _PREC_ADD, False) + "-" + _child(b, _PREC_ADD, True)
        case Mul(a=a, b=b):
            return _child(a, _PREC_MUL, False) + "*" + _child(b, _PREC_MUL, True)
        case Div(a=a, b=b):
            return _child(a, _PREC_MUL, False) + "/" + _child(b, _PREC_MUL, True)
        case Pow(base=b, exponent=n):
            return _child(b, _PREC_ATOM, False) + f"^{n}"
        case Call(func=fn, arg=a):
            return f"{fn}({render(a)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- expression matrices and vectors ----------------------------------------


@dataclass(frozen=True)
class ExprMatrix:
    """Rectangular grid of expressions; one cell per matrix entry."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if not rows or not rows[0]:
            raise ValueError("expression matrix must be nonempty")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged rows in expression matrix")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @classmethod
    def parse(cls, rows) -> "ExprMatrix":
        parsed = []
        for r, row in enumerate(rows):
            prow = []
            for c, src in enumerate(row):
                try:
                    prow.append(parse(src))
                except ParseError as e:
                    raise ParseError(f"entry ({r},{c}): {e}") from e
            parsed.append(tuple(prow))
        return cls(tuple(parsed))

    def is_constant(self) -> bool:
        return not any(depends_on_t(e) for row in self.entries for e in row)


def parse_vector(sources) -> list:
    out = []
    for m, src in enumerate(sources):
        try:
            out.append(parse(src))
        except ParseError as e:
            raise ParseError(f"entry ({m}): {e}") from e
    return out


def eval_matrix(M: ExprMatrix, t: float) -> QMatrix:
    """Evaluate cellwise; cell coordinates are attached to any error."""
    rows = []
    for r, row in enumerate(M.entries):
        qrow = []
        for c, e in enumerate(row):
            try:
                qrow.append(evaluate(e, t))
            except (EvalError, ZeroDivisionError, OverflowError) as err:
                raise EvalError(f"entry ({r},{c}) at t={t:g}: {err}") from err
        rows.append(qrow)
    return QMatrix(rows)


def eval_vector(exprs, t: float) -> QMatrix:
    """Evaluate a list of expressions into a column vector."""
    out = []
    for m, e in enumerate(exprs):
        if isinstance(e, str):
            e = parse(e)
        try:
            out.append(evaluate(e, t))
        except (EvalError, ZeroDivisionError, OverflowError) as err:
            raise EvalError(f"entry ({m}) at t={t:g}: {err}") from err
    return QMatrix.vector(out)
