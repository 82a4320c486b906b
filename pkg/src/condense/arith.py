"""Exact rational arithmetic for the six condensing rules.

Values are plain Python ``int`` when integral and ``fractions.Fraction``
otherwise, so they hash and compare interchangeably (``Fraction(3) == 3``)
and stay exact.  Every operation is guarded by :class:`SearchCaps` and
:class:`RuleSet`; the guarded entry points raise one of three distinct
exceptions so callers can tell configuration problems from mathematics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Union

ExactValue = Union[int, Fraction]

ADD, SUB, MUL, DIV, POW = "+", "-", "*", "/", "^"
BINARY_OPS = (ADD, SUB, MUL, DIV, POW)
FACT = "!"

OP_NAMES = {"add": ADD, "sub": SUB, "mul": MUL, "div": DIV, "pow": POW, "fact": FACT}
_RULE_FIELD = {ADD: "allow_add", SUB: "allow_sub", MUL: "allow_mul",
               DIV: "allow_div", POW: "allow_pow", FACT: "allow_fact"}

FACTORIAL_LIMIT = 20
_FACTORIALS = tuple(math.factorial(i) for i in range(FACTORIAL_LIMIT + 1))


class ArithError(ArithmeticError):
    """Base class for guarded-operation failures."""


class RuleDisabled(ArithError):
    """The operation is switched off in the active :class:`RuleSet`."""


class UndefinedOperation(ArithError):
    """The operation has no exact rational value (x/0, 2^(1/2), 0^-1, ...)."""


class ExceedsCaps(ArithError):
    """The exact result lies outside the active :class:`SearchCaps`."""


def exact(x) -> ExactValue:
    """Coerce ``x`` (int, Fraction, or ``"p/q"`` text) to canonical form."""
    if isinstance(x, bool):
        raise TypeError("booleans are not exact values")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        x = Fraction(x.strip())
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"cannot make an exact value from {type(x).__name__}")


def format_value(v: ExactValue) -> str:
    return str(v)


def is_integer(v: ExactValue) -> bool:
    return type(v) is int


@dataclass(frozen=True)
class SearchCaps:
    """Bounds that make the infinite closure of condensable values finite."""

    max_magnitude: ExactValue = 10**12
    max_denominator: int = 10**6
    max_factorial_arg: int = 12
    max_exponent_abs: int = 30

    def __post_init__(self):
        object.__setattr__(self, "max_magnitude", exact(self.max_magnitude))
        if self.max_magnitude <= 0:
            raise ValueError("max_magnitude must be positive")
        if self.max_denominator < 1:
            raise ValueError("max_denominator must be positive")
        if not 0 < self.max_factorial_arg <= FACTORIAL_LIMIT:
            raise ValueError(f"max_factorial_arg must lie in [1, {FACTORIAL_LIMIT}]")
        if self.max_exponent_abs < 1:
            raise ValueError("max_exponent_abs must be positive")

    def __le__(self, other: SearchCaps) -> bool:
        return all(getattr(self, f.name) <= getattr(other, f.name) for f in fields(self))

    def admits(self, v: ExactValue) -> bool:
        if type(v) is int:
            return -self.max_magnitude <= v <= self.max_magnitude
        return v.denominator <= self.max_denominator and abs(v) <= self.max_magnitude

    @classmethod
    def parse(cls, text: str, base: SearchCaps | None = None) -> SearchCaps:
        """Parse ``mag=...,den=...,fact=...,exp=...`` onto ``base``."""
        keys = {"mag": "max_magnitude", "den": "max_denominator",
                "fact": "max_factorial_arg", "exp": "max_exponent_abs"}
        changes = {}
        for item in filter(None, (p.strip() for p in text.split(","))):
            key, _, raw = item.partition("=")
            if key not in keys or not raw:
                raise ValueError(f"bad caps item {item!r}; expected one of {sorted(keys)}")
            value = _parse_cap_number(raw)
            changes[keys[key]] = value if key == "mag" else int(value)
        return replace(base or cls(), **changes)


def _parse_cap_number(raw: str) -> ExactValue:
    raw = raw.strip()
    if "^" in raw:
        b, e = raw.split("^", 1)
        return int(b) ** int(e)
    if "e" in raw.lower() and "/" not in raw:
        mant, exp_ = raw.lower().split("e", 1)
        return exact(Fraction(mant) * 10 ** int(exp_))
    return exact(raw)


@dataclass(frozen=True)
class RuleSet:
    """Which of the six rules are enabled, plus the two zero conventions."""

    allow_add: bool = True
    allow_sub: bool = True
    allow_mul: bool = True
    allow_div: bool = True
    allow_pow: bool = True
    allow_fact: bool = True
    zero_fact_is_one: bool = True
    zero_pow_zero_is_one: bool = True

    def allows(self, op: str) -> bool:
        return getattr(self, _RULE_FIELD[OP_NAMES.get(op, op)])

    @property
    def binary_ops(self) -> tuple[str, ...]:
        return tuple(op for op in BINARY_OPS if self.allows(op))

    @classmethod
    def parse(cls, text: str, base: RuleSet | None = None) -> RuleSet:
        """Apply a toggle list such as ``"-div,-fact,+pow"``."""
        changes = {}
        for item in filter(None, (p.strip() for p in text.split(","))):
            sign, name = (item[0], item[1:]) if item[0] in "+-" else ("+", item)
            if name not in OP_NAMES:
                raise ValueError(f"unknown rule {name!r}; expected one of {sorted(OP_NAMES)}")
            changes[_RULE_FIELD[OP_NAMES[name]]] = sign == "+"
        return replace(base or cls(), **changes)


DEFAULT_CAPS = SearchCaps()
DEFAULT_RULES = RuleSet()


class _Fail:
    __slots__ = ("reason",)

    def __init__(self, reason):
        self.reason = reason

    def __repr__(self):
        return f"<{self.reason}>"


UNDEFINED = _Fail("undefined")
EXCEEDS = _Fail("exceeds caps")


class Arith:
    """Guarded operations bound to one (caps, rules) configuration.

    The lowercase methods are the hot path used by the search engine: they
    return a value or one of the sentinels ``UNDEFINED`` / ``EXCEEDS`` and do
    not check whether the rule is enabled.
    """

    def __init__(self, caps: SearchCaps = DEFAULT_CAPS, rules: RuleSet = DEFAULT_RULES):
        self.caps = caps
        self.rules = rules
        self._mag = caps.max_magnitude
        self._den = caps.max_denominator
        self._exp = caps.max_exponent_abs
        self._fact = caps.max_factorial_arg
        # |p|^e may not exceed mag * den; compare bit lengths before computing
        self._num_bits = (math.floor(self._mag) * self._den).bit_length() + 1
        self._den_bits = self._den.bit_length() + 1
        self.ops = {ADD: self.add, SUB: self.sub, MUL: self.mul, DIV: self.div, POW: self.pow}

    def _check(self, v):
        if type(v) is int:
            if -self._mag <= v <= self._mag:
                return v
            return EXCEEDS
        if v.denominator == 1:
            return self._check(v.numerator)
        if v.denominator > self._den or abs(v) > self._mag:
            return EXCEEDS
        return v

    def add(self, a, b):
        return self._check(a + b)

    def sub(self, a, b):
        return self._check(a - b)

    def mul(self, a, b):
        return self._check(a * b)

    def div(self, a, b):
        if b == 0:
            return UNDEFINED
        if type(a) is int and type(b) is int:
            if a % b == 0:
                return self._check(a // b)
            return self._check(Fraction(a, b))
        return self._check(Fraction(a) / b)

    def pow(self, a, b):
        if type(b) is not int:
            return UNDEFINED
        if a == 0:
            if b > 0:
                return 0
            if b == 0 and self.rules.zero_pow_zero_is_one:
                return 1
            return UNDEFINED
        if abs(b) > self._exp:
            return EXCEEDS
        if a == 1:
            return 1
        if a == -1:
            return -1 if b & 1 else 1
        if type(a) is int:
            p, q = a, 1
        else:
            p, q = a.numerator, a.denominator
        if b < 0:
            p, q, b = q, p, -b
            if q < 0:
                p, q = -p, -q
        if (abs(p).bit_length() - 1) * b > self._num_bits:
            return EXCEEDS
        if (q.bit_length() - 1) * b > self._den_bits:
            return EXCEEDS
        if q == 1:
            return self._check(p**b)
        return self._check(Fraction(p**b, q**b))

    def factorial(self, a):
        if type(a) is not int or a < 0:
            return UNDEFINED
        if a == 0 and not self.rules.zero_fact_is_one:
            return UNDEFINED
        if a > self._fact:
            return EXCEEDS
        return self._check(_FACTORIALS[a])

    def binary(self, op, a, b):
        """Guarded binary operation; raises on failure."""
        op = OP_NAMES.get(op, op)
        if op not in self.ops:
            raise ValueError(f"unknown binary operation {op!r}")
        if not self.rules.allows(op):
            raise RuleDisabled(f"rule {op!r} is disabled")
        return _raise_on_fail(self.ops[op](exact(a), exact(b)), op, a, b)

    def fact(self, a):
        """Guarded factorial; raises on failure."""
        if not self.rules.allow_fact:
            raise RuleDisabled("rule '!' is disabled")
        return _raise_on_fail(self.factorial(exact(a)), FACT, a)


def _raise_on_fail(r, op, *args):
    if r is UNDEFINED:
        raise UndefinedOperation(f"{op} is undefined for {', '.join(map(str, args))}")
    if r is EXCEEDS:
        raise ExceedsCaps(f"{op} of {', '.join(map(str, args))} exceeds caps")
    return r


_ARITH_CACHE: dict[tuple[SearchCaps, RuleSet], Arith] = {}


def arith_for(caps: SearchCaps | None = None, rules: RuleSet | None = None) -> Arith:
    key = (caps or DEFAULT_CAPS, rules or DEFAULT_RULES)
    ar = _ARITH_CACHE.get(key)
    if ar is None:
        ar = _ARITH_CACHE[key] = Arith(*key)
    return ar


def apply_binary(op: str, a, b, caps: SearchCaps | None = None,
                 rules: RuleSet | None = None) -> ExactValue:
    """Apply one of ``+ - * / ^`` (or ``add``, ``sub``, ...) exactly.

    Raises :class:`RuleDisabled`, :class:`UndefinedOperation` or
    :class:`ExceedsCaps`.  Powers take integer exponents only.
    """
    return arith_for(caps, rules).binary(op, a, b)


def apply_factorial(a, caps: SearchCaps | None = None,
                    rules: RuleSet | None = None) -> ExactValue:
    """``a!`` for integers ``0 <= a <= caps.max_factorial_arg``."""
    return arith_for(caps, rules).fact(a)
