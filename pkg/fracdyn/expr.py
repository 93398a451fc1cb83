# Copyright 2019 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""A small expression language for problem data r(t, x), F(t, x), phi(x), psi(t).

Grammar, from loosest to tightest binding:

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          (right associative)
    atom    := number | "t" | "x" | func "(" expr ")" | "(" expr ")"
    func    := "exp" | "sin" | "cos" | "abs"

Expressions evaluate on NumPy arrays, print back to source that parses to an
equivalent tree, enclose their range over a box of (t, x) with interval
arithmetic and classify their behaviour as x tends to infinity.
"""
from __future__ import annotations

import abc
import dataclasses
import enum
import math
import operator
import re
from typing import Callable, Dict, List, Tuple, Union

import mpmath
import numpy as np
from mpmath import iv

from .utils import ArrayLike, ContractError

VARIABLES = ("t", "x")
FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}

Range = Tuple[float, float]


class ExpressionSyntaxError(ContractError):
    """The source text is not a valid expression.

    Attributes:
        offset: Character offset of the offending token.
    """

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(ContractError):
    """An expression was evaluated outside its domain."""


class Limit(enum.Enum):
    """Behaviour of an expression as x tends to infinity, uniformly in t."""

    ZERO = "zero"
    BOUNDED = "bounded"
    POS_INF = "+inf"
    NEG_INF = "-inf"
    UNKNOWN = "unknown"


_FLIP = {Limit.POS_INF: Limit.NEG_INF, Limit.NEG_INF: Limit.POS_INF}
_INFINITE = (Limit.POS_INF, Limit.NEG_INF)


def _interval(value: Union[float, Range]):
    if isinstance(value, tuple):
        lo, hi = value
        return iv.mpf([mpmath.mpf(lo), mpmath.mpf(hi)])
    return iv.mpf(value)


class Expr(abc.ABC):
    """Base class of expression tree nodes."""

    def __call__(self, t: ArrayLike = 0.0, x: ArrayLike = 0.0) -> np.ndarray:
        """Evaluate on arrays of t and x, broadcast against each other."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            value = self._evaluate(t, x)
        value = np.broadcast_to(np.asarray(value, dtype=float), np.broadcast(t, x).shape)
        if not np.all(np.isfinite(value)):
            raise EvaluationError(f"{self} is not finite on the requested points")
        return value

    def bounds(self, t: Range, x: Range) -> Range:
        """Enclose the range of the expression over the box t x x.

        Endpoints may be infinite, e.g. x = (1, math.inf).
        """
        value = self._enclose(_interval(t), _interval(x))
        return float(mpmath.mpf(value.a)), float(mpmath.mpf(value.b))

    def sup_abs(self, t: Range, x: Range) -> float:
        lo, hi = self.bounds(t, x)
        return max(abs(lo), abs(hi))

    def depends_on(self, name: str) -> bool:
        return any(
            isinstance(node, Var) and node.name == name for node in self.walk()
        )

    @abc.abstractmethod
    def walk(self):
        """Yield this node and all its descendants."""

    @abc.abstractmethod
    def _evaluate(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        pass

    @abc.abstractmethod
    def _enclose(self, t, x):
        pass

    @abc.abstractmethod
    def limit(self) -> Limit:
        """How the expression behaves as x tends to infinity."""


@dataclasses.dataclass(frozen=True)
class Num(Expr):
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ContractError("numbers in expressions must be finite")

    def __str__(self) -> str:
        return repr(float(self.value))

    def walk(self):
        yield self

    def _evaluate(self, t, x):
        return np.float64(self.value)

    def _enclose(self, t, x):
        return iv.mpf(self.value)

    def limit(self) -> Limit:
        return Limit.ZERO if self.value == 0 else Limit.BOUNDED


@dataclasses.dataclass(frozen=True)
class Var(Expr):
    name: str

    def __str__(self) -> str:
        return self.name

    def walk(self):
        yield self

    def _evaluate(self, t, x):
        return t if self.name == "t" else x

    def _enclose(self, t, x):
        return t if self.name == "t" else x

    def limit(self) -> Limit:
        # t ranges over a bounded interval.
        return Limit.BOUNDED if self.name == "t" else Limit.POS_INF


@dataclasses.dataclass(frozen=True)
class Unary(Expr):
    """Negation."""

    operand: Expr

    def __str__(self) -> str:
        return f"(-{self.operand})"

    def walk(self):
        yield self
        yield from self.operand.walk()

    def _evaluate(self, t, x):
        return -self.operand._evaluate(t, x)

    def _enclose(self, t, x):
        return -self.operand._enclose(t, x)

    def limit(self) -> Limit:
        kind = self.operand.limit()
        return _FLIP.get(kind, kind)


def _power(base: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    base, exponent = np.broadcast_arrays(base, exponent)
    if np.any((base == 0) & (exponent < 0)):
        raise EvaluationError("0 raised to a negative power")
    if np.any((base < 0) & (exponent != np.round(exponent))):
        raise EvaluationError("negative base with fractional exponent")
    return np.power(base, exponent)


def _divide(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    if np.any(np.asarray(right) == 0):
        raise EvaluationError("division by zero")
    return np.true_divide(left, right)


_BINARY = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _divide,
    "^": _power,
}


def _interval_power(base, exponent):
    lo, hi = mpmath.mpf(exponent.a), mpmath.mpf(exponent.b)
    integral = lo == hi and mpmath.isfinite(lo) and lo == int(lo)
    if not integral and mpmath.mpf(base.a) < 0:
        raise EvaluationError("negative base with fractional exponent")
    return base ** exponent


_INTERVAL_BINARY = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
    "^": _interval_power,
}


def _constant(expr: Expr):
    """The value of a subtree without variables, else None."""
    if any(isinstance(node, Var) for node in expr.walk()):
        return None
    try:
        return float(expr())
    except EvaluationError:
        return None


def _add_limits(left: Limit, right: Limit) -> Limit:
    if Limit.UNKNOWN in (left, right):
        return Limit.UNKNOWN
    if left in _INFINITE and right in _INFINITE:
        return left if left == right else Limit.UNKNOWN
    if left in _INFINITE:
        return left
    if right in _INFINITE:
        return right
    if left == right == Limit.ZERO:
        return Limit.ZERO
    return Limit.BOUNDED


def _scale_limit(kind: Limit, factor: float) -> Limit:
    if factor == 0:
        return Limit.ZERO
    if factor < 0:
        return _FLIP.get(kind, kind)
    return kind


def _mul_limits(left: Expr, right: Expr) -> Limit:
    c = _constant(left)
    if c is not None:
        return _scale_limit(right.limit(), c)
    c = _constant(right)
    if c is not None:
        return _scale_limit(left.limit(), c)
    a, b = left.limit(), right.limit()
    if Limit.UNKNOWN in (a, b):
        return Limit.UNKNOWN
    if a in _INFINITE and b in _INFINITE:
        return Limit.POS_INF if a == b else Limit.NEG_INF
    if a in _INFINITE or b in _INFINITE:
        return Limit.UNKNOWN
    if Limit.ZERO in (a, b):
        return Limit.ZERO
    return Limit.BOUNDED


def _div_limits(left: Expr, right: Expr) -> Limit:
    c = _constant(right)
    if c is not None:
        return Limit.UNKNOWN if c == 0 else _scale_limit(left.limit(), 1 / c)
    a, b = left.limit(), right.limit()
    if b in _INFINITE and a in (Limit.ZERO, Limit.BOUNDED):
        return Limit.ZERO
    return Limit.UNKNOWN


def _pow_limits(base: Expr, exponent: Expr) -> Limit:
    c = _constant(exponent)
    if c is not None:
        kind = base.limit()
        if c == 0:
            return Limit.BOUNDED
        if c > 0:
            if kind == Limit.NEG_INF:
                if c != int(c):
                    return Limit.UNKNOWN
                return Limit.POS_INF if int(c) % 2 == 0 else Limit.NEG_INF
            return kind
        return Limit.ZERO if kind in _INFINITE else Limit.UNKNOWN
    b = _constant(base)
    if b is not None and b > 0 and b != 1:
        kind = exponent.limit()
        if kind not in _INFINITE:
            return Limit.BOUNDED if kind != Limit.UNKNOWN else Limit.UNKNOWN
        grows = (kind == Limit.POS_INF) == (b > 1)
        return Limit.POS_INF if grows else Limit.ZERO
    return Limit.UNKNOWN


@dataclasses.dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"

    def walk(self):
        yield self
        yield from self.left.walk()
        yield from self.right.walk()

    def _evaluate(self, t, x):
        return _BINARY[self.op](self.left._evaluate(t, x), self.right._evaluate(t, x))

    def _enclose(self, t, x):
        return _INTERVAL_BINARY[self.op](self.left._enclose(t, x), self.right._enclose(t, x))

    def limit(self) -> Limit:
        if self.op == "+":
            return _add_limits(self.left.limit(), self.right.limit())
        if self.op == "-":
            return _add_limits(self.left.limit(), Unary(self.right).limit())
        if self.op == "*":
            return _mul_limits(self.left, self.right)
        if self.op == "/":
            return _div_limits(self.left, self.right)
        return _pow_limits(self.left, self.right)


@dataclasses.dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def __str__(self) -> str:
        return f"{self.func}({self.arg})"

    def walk(self):
        yield self
        yield from self.arg.walk()

    def _evaluate(self, t, x):
        return FUNCTIONS[self.func](self.arg._evaluate(t, x))

    def _enclose(self, t, x):
        arg = self.arg._enclose(t, x)
        if self.func == "abs":
            return abs(arg)
        return getattr(iv, self.func)(arg)

    def limit(self) -> Limit:
        if self.func in ("sin", "cos"):
            return Limit.BOUNDED
        kind = self.arg.limit()
        if self.func == "abs":
            return Limit.POS_INF if kind in _INFINITE else kind
        # exp
        if kind == Limit.NEG_INF:
            return Limit.ZERO
        if kind in (Limit.ZERO, Limit.BOUNDED):
            return Limit.BOUNDED
        return kind


_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclasses.dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(source: str) -> List[_Token]:
    tokens = []
    position = 0
    while position < len(source):
        if source[position:].strip() == "":
            break
        match = _TOKEN.match(source, position)
        if match is None:
            offset = position + len(source[position:]) - len(source[position:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {source[offset]!r}", offset)
        kind = match.lastgroup
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = _tokenize(source)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _accept(self, *ops: str) -> bool:
        if self.current.kind == "op" and self.current.text in ops:
            self.index += 1
            return True
        return False

    def _expect(self, op: str) -> None:
        if not self._accept(op):
            raise ExpressionSyntaxError(f"expected {op!r}", self.current.offset)

    def parse(self) -> Expr:
        tree = self._expr()
        if self.current.kind != "end":
            raise ExpressionSyntaxError(
                f"unexpected token {self.current.text!r}", self.current.offset
            )
        return tree

    def _expr(self) -> Expr:
        tree = self._term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.current.text
            self.index += 1
            tree = Binary(op, tree, self._term())
        return tree

    def _term(self) -> Expr:
        tree = self._unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.current.text
            self.index += 1
            tree = Binary(op, tree, self._unary())
        return tree

    def _unary(self) -> Expr:
        if self._accept("-"):
            return Unary(self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self._accept("^"):
            return Binary("^", base, self._unary())
        return base

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.index += 1
            return Num(float(token.text))
        if token.kind == "name":
            self.index += 1
            if token.text in FUNCTIONS:
                self._expect("(")
                arg = self._expr()
                self._expect(")")
                return Call(token.text, arg)
            if token.text in VARIABLES:
                return Var(token.text)
            raise ExpressionSyntaxError(f"unknown identifier {token.text!r}", token.offset)
        if self._accept("("):
            tree = self._expr()
            self._expect(")")
            return tree
        if token.kind == "end":
            raise ExpressionSyntaxError("unexpected end of input", token.offset)
        raise ExpressionSyntaxError(f"unexpected token {token.text!r}", token.offset)


def parse_expression(source: str) -> Expr:
    """Parse source text into an expression tree.

    Raises:
        ExpressionSyntaxError: With the offset of the offending token.
    """
    return _Parser(source).parse()


def as_expression(value: Union[Expr, str, float]) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Num(float(value))
    return parse_expression(value)


def vanishes_at_infinity(expr: Expr) -> bool:
    return expr.limit() == Limit.ZERO
