"""Closed-form real functions given as text.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

so ``^`` is right-associative, ``-2^2 == -4`` and ``2^-1 == 0.5``.
Functions: sin, cos, exp, log, sqrt, abs, pow.  Constants: pi, e.

Evaluation follows IEEE-754 double precision.  Domain errors are not trapped:
``log(0)`` is ``-inf``, ``sqrt(-1)`` and ``(-8)^(1/3)`` are ``nan``.
Bindings may be floats or numpy arrays; arrays evaluate elementwise.
"""

from __future__ import annotations

import math
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Callable, Union

import numpy as np

from .errors import (
    ExpressionSyntaxError,
    MissingBindingError,
    UnknownIdentifierError,
)

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "evaluate",
    "FUNCTIONS",
    "CONSTANTS",
]

FUNCTIONS: dict[str, tuple[int, Callable[..., Any]]] = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "log": (1, np.log),
    "sqrt": (1, np.sqrt),
    "abs": (1, np.abs),
    "pow": (2, np.power),
}

CONSTANTS: dict[str, float] = {"pi": math.pi, "e": math.e}

_BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


# -- syntax tree --------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self) -> str:
        if math.isinf(self.value):
            return "1e999"
        return repr(float(self.value))


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: Node

    def __str__(self) -> str:
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple[Node, ...]

    def __str__(self) -> str:
        return f"{self.func}({', '.join(map(str, self.args))})"


Node = Union[Num, Var, Neg, BinOp, Call]


# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", byte)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), byte))
        byte += len(m.group().encode("utf-8"))
        pos = m.end()
    tokens.append(_Token("end", "", byte))
    return tokens


class _Parser:
    def __init__(self, src: str, variables: Sequence[str]) -> None:
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = set(variables)

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind == "end":
            raise ExpressionSyntaxError(f"expected {text!r}", self.tok.offset)
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text in self.variables:
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                return self.call(tok)
            if tok.text in CONSTANTS:
                return Num(CONSTANTS[tok.text])
            raise UnknownIdentifierError(tok.text, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            raise ExpressionSyntaxError("unexpected end of input", tok.offset)
        raise ExpressionSyntaxError(f"unexpected {tok.text!r}", tok.offset)

    def call(self, name: _Token) -> Node:
        arity = FUNCTIONS[name.text][0]
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if len(args) != arity:
            raise ExpressionSyntaxError(
                f"{name.text}() takes {arity} argument(s), got {len(args)}", name.offset
            )
        return Call(name.text, tuple(args))


# -- compilation to closures --------------------------------------------------


def _compile(node: Node) -> Callable[[Mapping[str, Any]], Any]:
    if isinstance(node, Num):
        value = np.float64(node.value)
        return lambda env: value
    if isinstance(node, Var):
        name = node.name

        def lookup(env: Mapping[str, Any]) -> Any:
            try:
                return env[name]
            except KeyError:
                raise MissingBindingError(name) from None

        return lookup
    if isinstance(node, Neg):
        inner = _compile(node.operand)
        return lambda env: np.negative(inner(env))
    if isinstance(node, BinOp):
        fn = _BINARY[node.op]
        left, right = _compile(node.left), _compile(node.right)
        return lambda env: fn(left(env), right(env))
    if isinstance(node, Call):
        fn = FUNCTIONS[node.func][1]
        args = [_compile(a) for a in node.args]
        if len(args) == 1:
            (arg,) = args
            return lambda env: fn(arg(env))
        return lambda env: fn(*(a(env) for a in args))
    raise TypeError(f"not an expression node: {node!r}")


def _free_variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return _free_variables(node.operand)
    if isinstance(node, BinOp):
        return _free_variables(node.left) | _free_variables(node.right)
    if isinstance(node, Call):
        return set().union(*(_free_variables(a) for a in node.args))
    return set()


@dataclass(frozen=True)
class Expression:
    """A parsed expression over a fixed, ordered set of variables.

    Calling the expression binds positional arguments to ``variables`` in
    order, so ``parse("t^2", ["t"])(3.0) == 9.0``.
    """

    root: Node
    variables: tuple[str, ...]
    source: str = field(default="", compare=False)
    _fn: Callable[[Mapping[str, Any]], Any] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        unknown = _free_variables(self.root) - set(self.variables)
        if unknown:
            raise ValueError(f"undeclared variables in tree: {sorted(unknown)}")
        object.__setattr__(self, "_fn", _compile(self.root))

    def eval(self, bindings: Mapping[str, Any]) -> Any:
        with np.errstate(all="ignore"):
            out = self._fn(bindings)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def __call__(self, *args: Any) -> Any:
        if len(args) != len(self.variables):
            raise TypeError(
                f"expected {len(self.variables)} argument(s) "
                f"({', '.join(self.variables)}), got {len(args)}"
            )
        return self.eval(dict(zip(self.variables, args)))

    def __str__(self) -> str:
        return str(self.root)


def parse(src: str, variables: Sequence[str] = ("t",)) -> Expression:
    """Parse ``src`` into an :class:`Expression` over ``variables``.

    Raises :class:`~pcalc.errors.ExpressionSyntaxError` or
    :class:`~pcalc.errors.UnknownIdentifierError`, both carrying the byte
    offset of the offending token.
    """
    if not src or not src.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    for name in variables:
        if name in FUNCTIONS or name in CONSTANTS:
            raise ValueError(f"variable name {name!r} shadows a builtin")
    root = _Parser(src, variables).parse()
    return Expression(root, tuple(variables), src)


def evaluate(expr: Expression, bindings: Mapping[str, Any]) -> Any:
    return expr.eval(bindings)
