"""Textual defining functions: parse, pretty-print and compile to evaluables.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' intexp)?
    intexp  := ['-' | '+'] INT ('^' intexp)?        # right-associative, folded
    primary := NUMBER | '(' expr ')'
             | ('abs2' | 're' | 'im') '(' 'z' INT ')'
             | ('exp' | 'log' | 'sqrt') '(' expr ')'

Complex coordinates only enter through ``abs2``/``re``/``im``, so every
expression is real-valued by construction. A bare ``z1`` is rejected.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from . import calculus
from .errors import EvaluationError, QGaugeError

MAX_DEPTH = 100  # each level costs ~4 Python frames


class ParseError(QGaugeError, ValueError):
    """Base for expression errors; ``position`` is a byte offset into the UTF-8 source."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at byte {position}")


class ExprSyntaxError(ParseError):
    def __init__(self, position: int, expected: frozenset[str] | set[str], found: str = ""):
        self.expected = frozenset(expected)
        what = f"unexpected {found!r}" if found else "unexpected end of input"
        super().__init__(f"{what}; expected one of {sorted(self.expected)}", position)


class UnknownIdentifier(ParseError):
    def __init__(self, name: str, position: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", position)


class IndexOutOfRange(ParseError):
    def __init__(self, index: int, n: int, position: int):
        self.index = index
        self.n = n
        super().__init__(f"coordinate z{index} out of range for dimension {n}", position)


class BareComplexVariable(ParseError):
    def __init__(self, name: str, position: int):
        self.name = name
        super().__init__(f"complex variable {name!r} must be wrapped in abs2(), re() or im()", position)


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class RealConst:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str  # "abs2" | "re" | "im"
    index: int  # 1-based


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class PowInt:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str  # "exp" | "log" | "sqrt"
    arg: "Expr"


Expr = Union[RealConst, Var, Add, Sub, Mul, Div, PowInt, Call]

VAR_KINDS = ("abs2", "re", "im")
FUNCTIONS = ("exp", "log", "sqrt")
BINARY = {"+": (1, Add), "-": (1, Sub), "*": (2, Mul), "/": (2, Div)}
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}

# --- tokenizer --------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | id | op | end
    text: str
    pos: int  # character offset


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None or m.end() == i:
            rest = src[i:]
            if rest.strip() == "":
                break
            j = i + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(_byte_pos(src, j), {"number", "identifier", "operator"}, src[j])
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


def _byte_pos(src: str, char_pos: int) -> int:
    return len(src[:char_pos].encode("utf-8"))


class _Parser:
    def __init__(self, src: str, n: int):
        self.src = src
        self.n = n
        self.toks = _tokenize(src)
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected) -> ExprSyntaxError:
        t = self.tok
        return ExprSyntaxError(_byte_pos(self.src, t.pos), expected, t.text)

    def expect(self, text: str) -> _Tok:
        t = self.tok
        if t.kind == "op" and t.text == text:
            self.i += 1
            return t
        raise self.fail({text})

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExprSyntaxError(_byte_pos(self.src, self.tok.pos), {f"nesting depth <= {MAX_DEPTH}"}, self.tok.text)

    def parse(self) -> Expr:
        node = self.expr(0)
        if self.tok.kind != "end":
            raise self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self, min_prec: int) -> Expr:
        # precedence climbing over the left-associative binary operators
        self.enter()
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in BINARY:
            prec, node_type = BINARY[self.tok.text]
            if prec < min_prec:
                break
            self.i += 1
            right = self.expr(prec + 1)
            left = node_type(left, right)
        self.depth -= 1
        return left

    def unary(self) -> Expr:
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            self.i += 1
            self.enter()
            operand = self.unary()
            self.depth -= 1
            if t.text == "+":
                return operand
            if isinstance(operand, RealConst):
                return RealConst(-operand.value)
            return Sub(RealConst(0.0), operand)
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            return PowInt(base, self.int_exponent())
        return base

    def int_exponent(self) -> int:
        sign = 1
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            sign = -1 if t.text == "-" else 1
            self.i += 1
            t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            raise self.fail({"integer exponent"})
        self.i += 1
        k = sign * int(t.text)
        if self.tok.kind == "op" and self.tok.text == "^":
            at = self.tok
            self.i += 1
            e = self.int_exponent()
            if e < 0:
                raise ExprSyntaxError(_byte_pos(self.src, at.pos), {"nonnegative integer exponent"}, "^")
            k = k**e
        return k

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            value = float(t.text)
            if not math.isfinite(value):
                raise ExprSyntaxError(_byte_pos(self.src, t.pos), {"finite number"}, t.text)
            return RealConst(value)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr(0)
            self.expect(")")
            return node
        if t.kind == "id":
            name = t.text
            pos = _byte_pos(self.src, t.pos)
            if name in VAR_KINDS:
                self.i += 1
                self.expect("(")
                a = self.tok
                m = re.fullmatch(r"z(\d+)", a.text) if a.kind == "id" else None
                if m is None:
                    raise self.fail({"z<index>"})
                j = int(m.group(1))
                if not 1 <= j <= self.n:
                    raise IndexOutOfRange(j, self.n, _byte_pos(self.src, a.pos))
                self.i += 1
                self.expect(")")
                return Var(name, j)
            if name in FUNCTIONS:
                self.i += 1
                self.expect("(")
                arg = self.expr(0)
                self.expect(")")
                return Call(name, arg)
            if re.fullmatch(r"z\d+", name):
                raise BareComplexVariable(name, pos)
            raise UnknownIdentifier(name, pos)
        raise self.fail({"number", "identifier", "("})


def parse(src: str, n: int) -> Expr:
    """Parse a defining-function expression over ``z1 .. zn``."""
    if not src or not src.strip():
        raise ExprSyntaxError(0, {"expression"})
    return _Parser(src, n).parse()


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(float(v))
    return f"({s})" if s.startswith("-") else s


def print_canonical(node: Expr) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, RealConst):
        return _fmt_number(node.value)
    if isinstance(node, Var):
        return f"{node.kind}(z{node.index})"
    if isinstance(node, PowInt):
        return f"({print_canonical(node.base)} ^ {node.exponent})"
    if isinstance(node, Call):
        return f"{node.name}({print_canonical(node.arg)})"
    return f"({print_canonical(node.left)} {_SYMBOL[type(node)]} {print_canonical(node.right)})"


def max_index(node: Expr) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, RealConst):
        return 0
    if isinstance(node, (PowInt,)):
        return max_index(node.base)
    if isinstance(node, Call):
        return max_index(node.arg)
    return max(max_index(node.left), max_index(node.right))


# --- compilation -----------------------------------------------------------


def _div(a, b):
    if not isinstance(b, (calculus.Dual, calculus.Jet)) and b == 0:
        raise EvaluationError("division by zero")
    return a / b


def _pow(a, k):
    if not isinstance(a, (calculus.Dual, calculus.Jet)):
        if a == 0 and k < 0:
            raise EvaluationError("negative power of zero")
        return a**k
    return a**k


def _compile(node: Expr) -> Callable:
    if isinstance(node, RealConst):
        c = node.value
        return lambda x: c
    if isinstance(node, Var):
        ix = 2 * (node.index - 1)
        iy = ix + 1
        if node.kind == "abs2":
            return lambda x: x[ix] * x[ix] + x[iy] * x[iy]
        if node.kind == "re":
            return lambda x: x[ix]
        return lambda x: x[iy]
    if isinstance(node, PowInt):
        f = _compile(node.base)
        k = node.exponent
        return lambda x: _pow(f(x), k)
    if isinstance(node, Call):
        f = _compile(node.arg)
        g = getattr(calculus, node.name)
        return lambda x: g(f(x))
    lf, rf = _compile(node.left), _compile(node.right)
    if isinstance(node, Add):
        return lambda x: lf(x) + rf(x)
    if isinstance(node, Sub):
        return lambda x: lf(x) - rf(x)
    if isinstance(node, Mul):
        return lambda x: lf(x) * rf(x)
    return lambda x: _div(lf(x), rf(x))


class CompiledDefiningFunction:
    """Callable real function of the 2n interleaved coordinates.

    Accepts floats, :class:`~qgauge.calculus.Dual` or :class:`~qgauge.calculus.Jet`
    entries, so it plugs straight into :func:`~qgauge.calculus.eval_jet`.
    """

    def __init__(self, ast: Expr, n: int):
        if max_index(ast) > n:
            raise IndexOutOfRange(max_index(ast), n, 0)
        self.ast = ast
        self.n = n
        self._fn = _compile(ast)

    def __call__(self, x):
        try:
            return self._fn(x)
        except (ZeroDivisionError, OverflowError) as exc:
            raise EvaluationError(str(exc)) from exc

    @property
    def source(self) -> str:
        return print_canonical(self.ast)

    def __repr__(self):
        return f"CompiledDefiningFunction({self.source!r}, n={self.n})"


def compile(ast: Expr, n: int) -> CompiledDefiningFunction:  # noqa: A001 - mirrors parse/print naming
    return CompiledDefiningFunction(ast, n)


def compile_source(src: str, n: int) -> CompiledDefiningFunction:
    return CompiledDefiningFunction(parse(src, n), n)
