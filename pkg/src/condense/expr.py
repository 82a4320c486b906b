"""Digit multisets and expression trees over digit leaves.

Text grammar (``!`` tightest and stackable, ``^`` right-associative, then
``* /`` and ``+ -`` left-associative; no unary minus, no multi-digit
literals)::

    expr    := term (("+"|"-") term)*
    term    := factor (("*"|"/") factor)*
    factor  := postfix ("^" factor)?
    postfix := atom ("!")*
    atom    := DIGIT | "(" expr ")"
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Union

from .arith import (
    ADD, BINARY_OPS, DIV, FACT, MUL, POW, SUB,
    ArithError, RuleSet, SearchCaps, arith_for,
)


class DigitMultiset:
    """A multiset of decimal digits, stored as ten multiplicities."""

    __slots__ = ("counts", "size", "_hash")

    def __init__(self, counts: Iterable[int] = (0,) * 10):
        counts = tuple(int(c) for c in counts)
        if len(counts) != 10:
            raise ValueError("a digit multiset needs exactly ten counts")
        if any(c < 0 for c in counts):
            raise ValueError("negative multiplicities are undefined")
        self.counts = counts
        self.size = sum(counts)
        self._hash = hash(counts)

    @classmethod
    def of(cls, digits: Iterable[int] | str | int) -> DigitMultiset:
        """Build from digits: ``of([2, 5])``, ``of("390625")`` or ``of(2187)``."""
        if isinstance(digits, int):
            digits = str(digits)
        counts = [0] * 10
        for d in digits:
            d = int(d)
            if not 0 <= d <= 9:
                raise ValueError(f"{d} is not a decimal digit")
            counts[d] += 1
        return cls(counts)

    def digits(self) -> list[int]:
        """All elements in ascending order."""
        return [d for d in range(10) for _ in range(self.counts[d])]

    def support(self) -> frozenset[int]:
        return frozenset(d for d in range(10) if self.counts[d])

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits())

    def __len__(self) -> int:
        return self.size

    def __contains__(self, d) -> bool:
        return 0 <= d <= 9 and self.counts[d] > 0

    def __add__(self, other: DigitMultiset) -> DigitMultiset:
        return DigitMultiset(a + b for a, b in zip(self.counts, other.counts))

    def __sub__(self, other: DigitMultiset) -> DigitMultiset:
        return DigitMultiset(a - b for a, b in zip(self.counts, other.counts))

    def __eq__(self, other) -> bool:
        return isinstance(other, DigitMultiset) and self.counts == other.counts

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.digits())) + "}"


Multiset = Union[DigitMultiset, Iterable[int], str]


def as_multiset(s) -> DigitMultiset:
    return s if isinstance(s, DigitMultiset) else DigitMultiset.of(s)


@dataclass(frozen=True, slots=True)
class Leaf:
    digit: int

    def __post_init__(self):
        if type(self.digit) is not int or not 0 <= self.digit <= 9:
            raise ValueError(f"leaf must be a single decimal digit, got {self.digit!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True, slots=True)
class Factorial:
    inner: Expr

    def __str__(self):
        return render(self)


Expr = Union[Leaf, Binary, Factorial]


class EvaluationError(ArithmeticError):
    """Evaluation failed at ``path`` (a tuple of child indices from the root)."""

    def __init__(self, reason: ArithError, path: tuple[int, ...], subtree: Expr):
        self.reason = reason
        self.path = path
        self.subtree = subtree
        super().__init__(f"{reason} at {path or 'root'} in {render(subtree)!r}")


def evaluate(e: Expr, caps: SearchCaps | None = None, rules: RuleSet | None = None):
    """Exact value of ``e`` under the guarded operations.

    Raises :class:`EvaluationError` wrapping the arithmetic failure and the
    position of the offending subtree.
    """
    ar = arith_for(caps, rules)

    def ev(node, path):
        if type(node) is Leaf:
            return node.digit
        try:
            if type(node) is Factorial:
                inner = ev(node.inner, path + (0,))
                return ar.fact(inner)
            a = ev(node.left, path + (0,))
            b = ev(node.right, path + (1,))
            return ar.binary(node.op, a, b)
        except ArithError as exc:
            raise EvaluationError(exc, path, node) from None

    return ev(e, ())


def try_evaluate(e: Expr, caps: SearchCaps | None = None, rules: RuleSet | None = None):
    """Like :func:`evaluate` but returns ``None`` on failure."""
    try:
        return evaluate(e, caps, rules)
    except EvaluationError:
        return None


def leaves(e: Expr) -> DigitMultiset:
    counts = [0] * 10
    stack = [e]
    while stack:
        node = stack.pop()
        if type(node) is Leaf:
            counts[node.digit] += 1
        elif type(node) is Factorial:
            stack.append(node.inner)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return DigitMultiset(counts)


_PREC = {ADD: 1, SUB: 1, MUL: 2, DIV: 2, POW: 3}
_POSTFIX, _ATOM = 4, 5


def _prec(e: Expr) -> int:
    if type(e) is Leaf:
        return _ATOM
    if type(e) is Factorial:
        return _POSTFIX
    return _PREC[e.op]


def render(e: Expr) -> str:
    """Canonical text with the fewest parentheses that still round-trip."""
    out: list[str] = []

    def emit(node, need_parens):
        if need_parens:
            out.append("(")
        if type(node) is Leaf:
            out.append(str(node.digit))
        elif type(node) is Factorial:
            emit(node.inner, _prec(node.inner) < _POSTFIX)
            out.append(FACT)
        else:
            p = _PREC[node.op]
            if node.op == POW:
                emit(node.left, _prec(node.left) <= p)
                out.append(POW)
                emit(node.right, _prec(node.right) < p)
            else:
                emit(node.left, _prec(node.left) < p)
                out.append(node.op)
                emit(node.right, _prec(node.right) <= p)
        if need_parens:
            out.append(")")

    emit(e, False)
    return "".join(out)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class MultiDigitLiteral(ParseError):
    """Two digits in a row: concatenation is not one of the rules."""


def parse(text: str) -> Expr:
    """Parse expression text; inverse of :func:`render`."""
    tokens = [(i, ch) for i, ch in enumerate(text) if not ch.isspace()]
    pos = 0

    def peek():
        return tokens[pos][1] if pos < len(tokens) else None

    def where():
        return tokens[pos][0] if pos < len(tokens) else len(text)

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1][1]

    def expr():
        node = term()
        while peek() in (ADD, SUB):
            node = Binary(take(), node, term())
        return node

    def term():
        node = factor()
        while peek() in (MUL, DIV):
            node = Binary(take(), node, factor())
        return node

    def factor():
        base = postfix()
        if peek() == POW:
            take()
            return Binary(POW, base, factor())
        return base

    def postfix():
        node = atom()
        while peek() == FACT:
            take()
            node = Factorial(node)
        return node

    def atom():
        ch = peek()
        if ch is None:
            raise ParseError("unexpected end of input", where())
        if ch.isdigit() and ch.isascii():
            take()
            nxt = peek()
            if nxt is not None and nxt.isdigit():
                raise MultiDigitLiteral("multi-digit literal", where())
            return Leaf(int(ch))
        if ch == "(":
            take()
            node = expr()
            if peek() != ")":
                raise ParseError("expected ')'", where())
            take()
            return node
        raise ParseError(f"unexpected {ch!r}", where())

    node = expr()
    if pos != len(tokens):
        raise ParseError(f"unexpected {peek()!r}", where())
    return node


def size(e: Expr) -> int:
    """Number of leaves."""
    return leaves(e).size
