"""Decimal digits of powers of five, and proofs that each 5^n is selfcondensable.

The prover keeps the trailing 5 as the base and condenses the remaining
digits into the exponent n: directly by search when n is small, otherwise by
writing n in base 6 and condensing each base-6 digit and each factor 6 from
its own group of digits.
"""

from __future__ import annotations

import decimal
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .arith import ADD, MUL, RuleSet, SearchCaps
from .bounds import BASE_DELTA, base6_digits, dp_delta_bounds, interval, lemma_condense
from .expr import Binary, DigitMultiset, Expr, leaves, render, try_evaluate
from .search import engine

log = logging.getLogger(__name__)

DIRECT_SEARCH_MAX_DIGITS = 9
DIRECT_SEARCH_MAX_N = 60
DIRECT_SEARCH_NODES = 20_000

_CTX = decimal.Context(prec=decimal.MAX_PREC, Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)


@lru_cache(maxsize=128)
def pow5_text(n: int) -> str:
    """Decimal representation of 5^n, most significant digit first."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n < 3000:
        return str(5**n)
    return str(_CTX.power(decimal.Decimal(5), n))


@dataclass(frozen=True)
class DecimalDigits:
    n: int
    digits: tuple[int, ...]  # least significant first

    @property
    def text(self) -> str:
        return "".join(map(str, reversed(self.digits)))

    @property
    def multiset(self) -> DigitMultiset:
        return DigitMultiset.of(self.digits)

    def __len__(self) -> int:
        return len(self.digits)


def pow5_decimal(n: int) -> DecimalDigits:
    if n < 1:
        raise ValueError("n must be positive")
    return DecimalDigits(n, tuple(int(c) for c in reversed(pow5_text(n))))


def digit_count(n: int) -> int:
    """Number of decimal digits of 5^n, i.e. floor(n·log10 5) + 1."""
    return len(pow5_text(n))


def digit_histogram(n: int) -> list[int]:
    s = pow5_text(n)
    return [s.count(str(d)) for d in range(10)]


def zero_fraction(n: int) -> Fraction:
    s = pow5_text(n)
    return Fraction(s.count("0"), len(s))


@dataclass(frozen=True)
class SelfWitness:
    """5^n written with its own digits as 5^(exponent_expr).

    ``exponent_expr`` is None only for n = 1, where 5 is simply 5.
    """

    n: int
    base_digit_position: int
    exponent_expr: Expr | None
    method: str = "search"

    @property
    def identity(self) -> str:
        if self.exponent_expr is None:
            return "5 = 5"
        return f"{pow5_text(self.n)} = 5^({render(self.exponent_expr)})"


class Validation(NamedTuple):
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def validate_selfcondensing(n: int, w: SelfWitness, caps: SearchCaps | None = None,
                            rules: RuleSet | None = None) -> Validation:
    """Check the exponent evaluates to n and its digits plus the base 5 are
    exactly the digits of 5^n."""
    digits = pow5_decimal(n)
    if digits.digits[w.base_digit_position] != 5:
        return Validation(False, f"digit at position {w.base_digit_position} is not 5")
    if w.exponent_expr is None:
        if n != 1:
            return Validation(False, "value mismatch: empty exponent only works for n = 1")
        return Validation(True)
    if try_evaluate(w.exponent_expr, caps, rules) != n:
        return Validation(False, "value mismatch")
    if leaves(w.exponent_expr) + DigitMultiset.of([5]) != digits.multiset:
        return Validation(False, "multiset mismatch")
    return Validation(True)


class InsufficientDigits(ValueError):
    pass


def _groups(digits: list[int], sizes: list[int]) -> list[DigitMultiset]:
    surplus = len(digits) - sum(sizes)
    if surplus < 0:
        raise InsufficientDigits(f"need {sum(sizes)} digits, have {len(digits)}")
    out, i = [], 0
    for j, size in enumerate(sizes):
        take = size + (surplus if j == 0 else 0)
        out.append(DigitMultiset.of(digits[i:i + take]))
        i += take
    return out


def horner_budget(n: int) -> int:
    """Digits used by the base-6 construction of n."""
    a = base6_digits(n)
    return sum(BASE_DELTA[d] for d in a if d) + BASE_DELTA[6] * (len(a) - 1)


def condense_by_base6(n: int, s) -> Expr:
    """n from the digits of ``s`` via n = a0 + 6(a1 + 6(a2 + ...)).

    Zero base-6 digits contribute no term, only the factor 6.
    """
    a = base6_digits(n)
    top = len(a) - 1
    # group order: top digit, then per lower position a six-factor and maybe a digit
    sizes, plan = [BASE_DELTA[a[top]]], [a[top]]
    for i in range(top - 1, -1, -1):
        sizes.append(BASE_DELTA[6])
        plan.append(6)
        if a[i]:
            sizes.append(BASE_DELTA[a[i]])
            plan.append(-a[i])
    groups = _groups(DigitMultiset.of(s).digits(), sizes)
    expr = lemma_condense(plan[0], groups[0])
    for value, group in zip(plan[1:], groups[1:]):
        part = lemma_condense(abs(value), group)
        expr = Binary(MUL, expr, part) if value == 6 else Binary(ADD, expr, part)
    return expr


def condense_by_table(n: int, s, table=None) -> Expr:
    """n from the digits of ``s`` following the sum/product derivation that
    gives the best tabulated bound."""
    table = table or dp_delta_bounds(max(n, 6))

    def build(m, ms):
        entry = table[m]
        if entry.kind == "base":
            return lemma_condense(m, ms)
        ga, gb = _groups(ms.digits(), [table.bound(entry.a), table.bound(entry.b)])
        op = ADD if entry.kind == "sum" else MUL
        return Binary(op, build(entry.a, ga), build(entry.b, gb))

    ms = DigitMultiset.of(s)
    if ms.size < table.bound(n):
        raise InsufficientDigits(f"need {table.bound(n)} digits, have {ms.size}")
    return build(n, ms)


def prove_selfcondensable(n: int, caps: SearchCaps | None = None,
                          rules: RuleSet | None = None) -> SelfWitness:
    """A validated witness that 5^n can be written with its own digits."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return SelfWitness(1, 0, None, "trivial")
    digits = pow5_decimal(n)
    rest = digits.multiset - DigitMultiset.of([5])
    candidates = []
    if rest.size <= DIRECT_SEARCH_MAX_DIGITS or n <= DIRECT_SEARCH_MAX_N:
        w = engine(caps, rules).find(rest, n, max_nodes=DIRECT_SEARCH_NODES)
        if w is not None:
            candidates.append((w, "search"))
    if not candidates:
        for method, build in (("base6", condense_by_base6), ("table", condense_by_table)):
            try:
                candidates.append((build(n, rest), method))
                break
            except InsufficientDigits as exc:
                log.debug("n=%d: %s construction does not fit: %s", n, method, exc)
    for w, method in candidates:
        witness = SelfWitness(n, 0, w, method)
        verdict = validate_selfcondensing(n, witness, caps, rules)
        if verdict:
            return witness
        log.warning("n=%d: %s witness rejected (%s)", n, method, verdict.reason)
    raise InsufficientDigits(f"no selfcondensing found for 5^{n}")


# ----- the n >= 53 and n >= 24 thresholds ------------------------------------

@dataclass
class ThresholdReport:
    crossover: int                       # first n where the log bound fits
    left: dict[int, tuple[Fraction, Fraction]]   # 13·log6(n)+7 enclosures
    right: dict[int, tuple[Fraction, Fraction]]  # n·log10(5)-1 enclosures
    table_rows: dict[int, tuple[int, int]]       # n -> (δ bound, floor(n·log10 5))

    @property
    def holds_at_53(self) -> bool:
        return self.left[53][1] <= self.right[53][0]

    @property
    def fails_at_52(self) -> bool:
        return self.left[52][0] > self.right[52][1]

    @property
    def table_ok(self) -> bool:
        return all(b <= f for b, f in self.table_rows.values())

    @property
    def ok(self) -> bool:
        return self.crossover == 53 and self.holds_at_53 and self.fails_at_52 and self.table_ok


def _log_fits(n: int) -> tuple[bool, tuple, tuple]:
    """Decide 13·log6(n) + 7 <= n·log10(5) - 1 with interval arithmetic."""
    dps = 40
    while True:
        left = interval(lambda m: 13 * m.log(m.mpf(n)) / m.log(m.mpf(6)) + 7, dps)
        right = interval(lambda m: n * m.log10(m.mpf(5)) - 1, dps)
        if left[1] <= right[0]:
            return True, left, right
        if left[0] > right[1]:
            return False, left, right
        dps *= 2


def verify_thresholds(table_range: range = range(24, 61)) -> ThresholdReport:
    left, right, crossover = {}, {}, None
    for n in range(1, 54):
        fits, lo_hi, r = _log_fits(n)
        left[n], right[n] = lo_hi, r
        if fits and crossover is None:
            crossover = n
    table = dp_delta_bounds(max(table_range))
    rows = {n: (table.bound(n), digit_count(n) - 1) for n in table_range}
    return ThresholdReport(crossover, left, right, rows)
