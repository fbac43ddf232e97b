"""Complex-analytic expressions in one variable: parse, evaluate, differentiate.

The grammar covers complex constants, the imaginary literal ``i``, one free
variable, ``+ - * /``, integer powers written ``base^k``, unary minus, and
the functions exp, log, sin, cos, tan, atan, sinh, cosh, tanh, sqrt.
Exponents are restricted to integer literals so that symbolic differentiation
stays closed over the grammar; general powers must be spelled
``exp(a*log(w))``.  log, sqrt and atan use principal branches.

Operator precedence, tightest first: ``^``, unary ``-``, ``* /``, ``+ -``.
Binary operators associate to the left; ``name(arg)`` is a function call.

There is no simplifier beyond constant folding (applied to derivatives):
callers compare values, not tree shapes.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "AnalyticExpr",
    "TwoVarExpr",
    "Const",
    "Var",
    "Unary",
    "Binary",
    "Power",
    "FUNCTIONS",
    "ExprSyntaxError",
    "UnknownIdentifier",
    "EvalDomainError",
    "parse",
    "parse_xy",
    "evaluate",
    "differentiate",
    "to_source",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "atan", "sinh", "cosh", "tanh", "sqrt")


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifier(ValueError):
    """An identifier other than the free variable(s), ``i``, or a function name."""

    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} (offset {offset})")
        self.name = name
        self.offset = offset


class EvalDomainError(ArithmeticError):
    """Evaluation hit a pole, a branch point, or overflowed.

    ``subexpr`` is the offending AST node and ``value`` the input it choked on.
    """

    def __init__(self, reason: str, subexpr, value):
        super().__init__(f"{reason} in {_to_source_node(subexpr)} at {value!r}")
        self.reason = reason
        self.subexpr = subexpr
        self.value = value


# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a FUNCTIONS member
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # "add" | "sub" | "mul" | "div"
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


Node = Union[Const, Var, Unary, Binary, Power]


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"\d+\Z")


def _tokenize(src: str):
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            m = _NUMBER_RE.match(src, i)
            tokens.append(("num", m.group(0), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _NAME_RE.match(src, i)
            tokens.append(("name", m.group(0), i))
            i = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str, varnames):
        self.tokens = _tokenize(src)
        self.pos = 0
        self.varnames = tuple(varnames)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, symbol: str):
        kind, text, offset = self.peek()
        if kind != "op" or text != symbol:
            raise ExprSyntaxError(f"expected {symbol!r}", offset)
        return self.advance()

    def parse(self) -> Node:
        node = self.expression()
        kind, _, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError("unexpected trailing input", offset)
        return node

    def expression(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                node = Binary("add" if text == "+" else "sub", node, rhs)
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.unary()
                node = Binary("mul" if text == "*" else "div", node, rhs)
            else:
                return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Unary("neg", self.unary())
        if kind == "op" and text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        node = self.primary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == "^":
                self.advance()
                node = Power(node, self.exponent())
            else:
                return node

    def exponent(self) -> int:
        kind, text, offset = self.peek()
        if kind == "op" and text == "(":
            self.advance()
            k = self.exponent()
            self.expect_op(")")
            return k
        sign = 1
        if kind == "op" and text in "+-":
            self.advance()
            sign = -1 if text == "-" else 1
            kind, text, offset = self.peek()
        if kind != "num" or not _INT_RE.match(text):
            raise ExprSyntaxError("power exponent must be an integer literal", offset)
        self.advance()
        return sign * int(text)

    def primary(self) -> Node:
        kind, text, offset = self.advance()
        if kind == "num":
            return Const(complex(float(text)))
        if kind == "name":
            if text == "i":
                return Const(1j)
            if text in self.varnames:
                return Var(text)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expression()
                self.expect_op(")")
                return Unary(text, arg)
            raise UnknownIdentifier(text, offset)
        if kind == "op" and text == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise ExprSyntaxError("expected a value", offset)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

_CMATH_FN: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp,
    "log": cmath.log,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": cmath.tan,
    "atan": cmath.atan,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
    "tanh": cmath.tanh,
    "sqrt": cmath.sqrt,
}


def _check_finite(value: complex, node: Node, at) -> complex:
    if not cmath.isfinite(value):
        raise EvalDomainError("overflow", node, at)
    return value


def _eval_node(node: Node, env: dict) -> complex:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        v = _eval_node(node.arg, env)
        if node.op == "neg":
            return -v
        if node.op == "log" and v == 0:
            raise EvalDomainError("log of zero", node, v)
        try:
            out = _CMATH_FN[node.op](v)
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise EvalDomainError(str(exc) or "domain error", node, v) from None
        return _check_finite(out, node, v)
    if isinstance(node, Binary):
        a = _eval_node(node.left, env)
        b = _eval_node(node.right, env)
        if node.op == "add":
            out = a + b
        elif node.op == "sub":
            out = a - b
        elif node.op == "mul":
            out = a * b
        else:
            if b == 0:
                raise EvalDomainError("division by zero", node, b)
            out = a / b
        return _check_finite(out, node, (a, b))
    if isinstance(node, Power):
        base = _eval_node(node.base, env)
        if base == 0 and node.exponent < 0:
            raise EvalDomainError("zero to a negative power", node, base)
        try:
            out = base ** node.exponent
        except (OverflowError, ZeroDivisionError) as exc:
            raise EvalDomainError(str(exc) or "power overflow", node, base) from None
        return _check_finite(out, node, base)
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# differentiation (exact within the grammar, constant folding only)
# ---------------------------------------------------------------------------

def _d(node: Node, name: str) -> Node:
    if isinstance(node, Const):
        return Const(0j)
    if isinstance(node, Var):
        return Const(1 + 0j) if node.name == name else Const(0j)
    if isinstance(node, Unary):
        u, du = node.arg, _d(node.arg, name)
        op = node.op
        if op == "neg":
            return Unary("neg", du)
        if op == "exp":
            return Binary("mul", Unary("exp", u), du)
        if op == "log":
            return Binary("div", du, u)
        if op == "sqrt":
            return Binary("div", du, Binary("mul", Const(2 + 0j), Unary("sqrt", u)))
        if op == "sin":
            return Binary("mul", Unary("cos", u), du)
        if op == "cos":
            return Unary("neg", Binary("mul", Unary("sin", u), du))
        if op == "tan":
            sec2 = Binary("add", Const(1 + 0j), Power(Unary("tan", u), 2))
            return Binary("mul", sec2, du)
        if op == "atan":
            return Binary("div", du, Binary("add", Const(1 + 0j), Power(u, 2)))
        if op == "sinh":
            return Binary("mul", Unary("cosh", u), du)
        if op == "cosh":
            return Binary("mul", Unary("sinh", u), du)
        if op == "tanh":
            sech2 = Binary("sub", Const(1 + 0j), Power(Unary("tanh", u), 2))
            return Binary("mul", sech2, du)
        raise ValueError(f"unknown unary op {op!r}")
    if isinstance(node, Binary):
        a, b = node.left, node.right
        da, db = _d(a, name), _d(b, name)
        if node.op == "add":
            return Binary("add", da, db)
        if node.op == "sub":
            return Binary("sub", da, db)
        if node.op == "mul":
            return Binary("add", Binary("mul", da, b), Binary("mul", a, db))
        num = Binary("sub", Binary("mul", da, b), Binary("mul", a, db))
        return Binary("div", num, Power(b, 2))
    if isinstance(node, Power):
        k = node.exponent
        if k == 0:
            return Const(0j)
        dbase = _d(node.base, name)
        if k == 1:
            return dbase
        scaled = Binary("mul", Const(complex(k)), Power(node.base, k - 1))
        return Binary("mul", scaled, dbase)
    raise TypeError(f"not an expression node: {node!r}")


def _fold(node: Node) -> Node:
    """Constant folding plus identity-element elision; never drops singularities."""
    if isinstance(node, (Const, Var)):
        return node
    if isinstance(node, Unary):
        arg = _fold(node.arg)
        out = Unary(node.op, arg)
        if isinstance(arg, Const):
            try:
                return Const(_eval_node(out, {}))
            except EvalDomainError:
                return out
        return out
    if isinstance(node, Binary):
        left = _fold(node.left)
        right = _fold(node.right)
        out = Binary(node.op, left, right)
        if isinstance(left, Const) and isinstance(right, Const):
            try:
                return Const(_eval_node(out, {}))
            except EvalDomainError:
                return out
        if node.op == "add":
            if isinstance(left, Const) and left.value == 0:
                return right
            if isinstance(right, Const) and right.value == 0:
                return left
        elif node.op == "sub":
            if isinstance(right, Const) and right.value == 0:
                return left
        elif node.op == "mul":
            if isinstance(left, Const) and left.value == 1:
                return right
            if isinstance(right, Const) and right.value == 1:
                return left
        elif node.op == "div":
            if isinstance(right, Const) and right.value == 1:
                return left
        return out
    if isinstance(node, Power):
        base = _fold(node.base)
        if node.exponent == 1:
            return base
        if node.exponent == 0 and isinstance(base, (Const, Var)):
            return Const(1 + 0j)
        if isinstance(base, Const):
            try:
                return Const(_eval_node(Power(base, node.exponent), {}))
            except EvalDomainError:
                pass
        return Power(base, node.exponent)
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _format_const(c: complex) -> str:
    re_, im = c.real, c.imag
    if im == 0:
        return repr(re_)
    if re_ == 0:
        return f"({im!r}*i)"
    sign = "+" if im > 0 else "-"
    return f"({re_!r} {sign} {abs(im)!r}*i)"


_BINARY_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def _to_source_node(node: Node) -> str:
    if isinstance(node, Const):
        return _format_const(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        inner = _to_source_node(node.arg)
        if node.op == "neg":
            return f"(-{inner})"
        return f"{node.op}({inner})"
    if isinstance(node, Binary):
        return f"({_to_source_node(node.left)} {_BINARY_SYMBOL[node.op]} {_to_source_node(node.right)})"
    if isinstance(node, Power):
        return f"({_to_source_node(node.base)}^{node.exponent})"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# public wrappers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticExpr:
    """A parsed expression in one free variable ``varname``."""

    root: Node
    varname: str

    def eval(self, w) -> complex:
        return _eval_node(self.root, {self.varname: complex(w)})

    __call__ = eval

    def derivative(self) -> "AnalyticExpr":
        return AnalyticExpr(_fold(_d(self.root, self.varname)), self.varname)

    def source(self) -> str:
        return _to_source_node(self.root)

    def __str__(self) -> str:
        return self.source()


@dataclass(frozen=True)
class TwoVarExpr:
    """An expression in two free variables, used for user-defined graphs z = Z(x, y).

    The two names share one grammar; differentiation w.r.t. one name treats the
    other as a constant leaf.
    """

    root: Node
    xname: str
    yname: str

    def eval(self, x, y) -> complex:
        return _eval_node(self.root, {self.xname: complex(x), self.yname: complex(y)})

    __call__ = eval

    def partial(self, name: str) -> "TwoVarExpr":
        if name not in (self.xname, self.yname):
            raise ValueError(f"{name!r} is not a variable of this expression")
        return TwoVarExpr(_fold(_d(self.root, name)), self.xname, self.yname)

    def source(self) -> str:
        return _to_source_node(self.root)

    def __str__(self) -> str:
        return self.source()


def parse(src: str, varname: str = "w") -> AnalyticExpr:
    """Parse ``src`` into an AST over the single free variable ``varname``."""
    return AnalyticExpr(_Parser(src, (varname,)).parse(), varname)


def parse_xy(src: str, xname: str = "x", yname: str = "y") -> TwoVarExpr:
    """Parse a two-variable graph expression (literal substitution of both names)."""
    return TwoVarExpr(_Parser(src, (xname, yname)).parse(), xname, yname)


def evaluate(e: AnalyticExpr, w) -> complex:
    """Evaluate ``e`` at ``w`` with principal branches."""
    return e.eval(w)


def differentiate(e: AnalyticExpr) -> AnalyticExpr:
    """Exact symbolic derivative of ``e`` within the grammar."""
    return e.derivative()


def to_source(e) -> str:
    """Round-trippable text form: ``parse(to_source(e))`` evaluates identically."""
    return e.source()
