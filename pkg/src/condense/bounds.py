"""Constructive condensing of small constants and upper bounds on δ(n).

:func:`lemma_condense` builds a witness for 1..6 from *any* multiset of at
least ``BASE_DELTA[t]`` digits by explicit case analysis, so it never
searches.  Zeros are first turned into ones as ``0!``.  Larger multisets are
shrunk with :func:`~condense.search.reduce_multiset` before the case
analysis and the subtractions are spliced back in afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv, mpf

from .arith import ADD, DIV, MUL, POW, SUB
from .expr import Binary, DigitMultiset, Expr, Factorial, Leaf, as_multiset
from .search import all_multisets, reduce_multiset, splice_reduction

BASE_DELTA = {1: 4, 2: 5, 3: 6, 4: 7, 5: 7, 6: 6}


class CaseAnalysisError(AssertionError):
    """A multiset fell through every case; this is a bug, not a verdict."""


def _lf(d: int) -> Expr:
    return Leaf(d)


def _item(d: int) -> tuple[int, Expr]:
    return (1, Factorial(Leaf(0))) if d == 0 else (d, Leaf(d))


def _add(*xs: Expr) -> Expr:
    out = xs[0]
    for x in xs[1:]:
        out = Binary(ADD, out, x)
    return out


def _b(op, a, b) -> Expr:
    return Binary(op, a, b)


# Hand witnesses for the four-digit sets whose entries are pairwise >= 2 apart.
_ONE_FROM_FOUR = {
    (2, 4, 6, 8): lambda: _b(POW, _b(DIV, _b(ADD, _lf(2), _lf(4)), _lf(6)), _lf(8)),
    (2, 4, 6, 9): lambda: _b(POW, _b(DIV, _b(ADD, _lf(2), _lf(4)), _lf(6)), _lf(9)),
    (2, 4, 7, 9): lambda: _b(POW, _b(SUB, _b(MUL, _lf(2), _lf(4)), _lf(7)), _lf(9)),
    (2, 5, 7, 9): lambda: _b(POW, _b(SUB, _b(MUL, _lf(2), _lf(5)), _lf(9)), _lf(7)),
    (3, 5, 7, 9): lambda: _b(POW, _b(SUB, _b(SUB, _lf(9), _lf(3)), _lf(5)), _lf(7)),
}


def _unit_pair(items):
    """First pair (in index order) that is equal or one apart, as an
    expression of value 1 plus the indices used."""
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (vi, ei), (vj, ej) = items[i], items[j]
            if vi == vj:
                return _b(DIV, ei, ej), (i, j)
            if abs(vi - vj) == 1:
                hi, lo = (ei, ej) if vi > vj else (ej, ei)
                return _b(SUB, hi, lo), (i, j)
    return None


def _one_from_items(items) -> Expr | None:
    """1 from three or four normalised items, or None (only for the three
    exceptional triples)."""
    for i, (v, e) in enumerate(items):
        if v == 1:
            rest = [x for k, (_, x) in enumerate(items) if k != i]
            return _b(POW, e, _add(*rest))
    pair = _unit_pair(items)
    if pair is not None:
        unit, used = pair
        rest = [x for k, (_, x) in enumerate(items) if k not in used]
        return _b(POW, unit, _add(*rest))
    vals = tuple(v for v, _ in items)
    if len(items) == 4:
        return _ONE_FROM_FOUR[vals]()
    (a, ea), (b, eb), (c, ec) = sorted(items, key=lambda it: it[0])
    for value, build in (
        (Fraction(a + b, c), lambda: _b(DIV, _b(ADD, ea, eb), ec)),
        (Fraction(a * b, c), lambda: _b(DIV, _b(MUL, ea, eb), ec)),
        (a + b - c, lambda: _b(SUB, _b(ADD, ea, eb), ec)),
        (c - a - b, lambda: _b(SUB, _b(SUB, ec, ea), eb)),
        (c - a * b, lambda: _b(SUB, ec, _b(MUL, ea, eb))),
        (a * b - c, lambda: _b(SUB, _b(MUL, ea, eb), ec)),
    ):
        if value == 1:
            return build()
    return None


def _items(ms: DigitMultiset):
    return [_item(d) for d in ms.digits()]


def _one4(ms: DigitMultiset) -> Expr:
    return _one_from_items(_items(ms))


def one_from_triple(ms) -> Expr | None:
    """1 from three digits by the case analysis for triples, or None."""
    ms = as_multiset(ms)
    if ms.size != 3:
        raise ValueError("expected exactly three digits")
    return _one_from_items(_items(ms))


def _drop(ms: DigitMultiset, *ds: int) -> DigitMultiset:
    return ms - DigitMultiset.of(ds)


def _two5(ms: DigitMultiset) -> Expr:
    digits = ms.digits()
    x = digits[0]
    if x <= 3:
        one = _one4(_drop(ms, x))
        return {
            0: lambda: _b(ADD, Factorial(_lf(0)), one),
            1: lambda: _b(ADD, _lf(1), one),
            2: lambda: _b(MUL, _lf(2), one),
            3: lambda: _b(SUB, _lf(3), one),
        }[x]()
    items = _items(ms)
    pair = _unit_pair(items)
    if pair is None:
        raise CaseAnalysisError(f"no equal or adjacent pair in {ms!r}")
    unit, (i, j) = pair
    rest_ms = _drop(ms, digits[i], digits[j])
    one = _one4_or_triple(rest_ms)
    if one is not None:
        return _b(ADD, unit, one)
    rest = tuple(rest_ms.digits())
    equal = digits[i] == digits[j]
    if rest == (4, 6, 8):
        return _b(MUL, _b(SUB, _b(ADD, _lf(4), _lf(6)), _lf(8)), unit)
    if rest == (4, 7, 9):
        seven_from_nine = _b(SUB, _lf(9), _lf(7))
        if equal:
            return _b(DIV, _b(MUL, _lf(4), _lf(digits[i])),
                      _b(MUL, seven_from_nine, _lf(digits[j])))
        return _b(DIV, _b(MUL, _lf(4), unit), seven_from_nine)
    if rest == (5, 7, 9):
        return _b(MUL, _b(SUB, _lf(7), _lf(5)), _b(POW, unit, _lf(9)))
    raise CaseAnalysisError(f"unhandled triple {rest} in {ms!r}")


def _one4_or_triple(ms: DigitMultiset) -> Expr | None:
    return _one_from_items(_items(ms))


def _three6(ms: DigitMultiset) -> Expr:
    digits = ms.digits()
    x = digits[0]
    if x <= 6:
        rest = _drop(ms, x)
        if x in (0, 1, 5, 6):
            two = _two5(rest)
        else:
            one = lemma_condense(1, rest)
        return {
            0: lambda: _b(ADD, Factorial(_lf(0)), two),
            1: lambda: _b(ADD, _lf(1), two),
            2: lambda: _b(ADD, _lf(2), one),
            3: lambda: _b(MUL, _lf(3), one),
            4: lambda: _b(SUB, _lf(4), one),
            5: lambda: _b(SUB, _lf(5), two),
            6: lambda: _b(DIV, _lf(6), two),
        }[x]()
    # every digit is 7, 8 or 9: pair neighbours in sorted order
    diffs = sorted(
        ((digits[i + 1] - digits[i], _b(SUB, _lf(digits[i + 1]), _lf(digits[i])))
         for i in (0, 2, 4)),
        key=lambda it: it[0])
    vals = tuple(v for v, _ in diffs)
    (_, p), (_, q), (_, r) = diffs
    if vals == (0, 0, 0):
        return _add(Factorial(p), Factorial(q), Factorial(r))
    if vals == (0, 0, 1):
        return _add(Factorial(p), Factorial(q), r)
    if vals == (0, 0, 2):
        return _b(ADD, _b(MUL, Factorial(p), Factorial(q)), r)
    if vals == (0, 1, 1):
        return _add(Factorial(p), q, r)
    raise CaseAnalysisError(f"unexpected differences {vals} for {ms!r}")


def _four_or_five7(t: int, ms: DigitMultiset) -> Expr:
    digits = ms.digits()
    x = digits[0]
    if x <= 8:
        rest = _drop(ms, x)
        c = lambda k: lemma_condense(k, rest)  # noqa: E731
        zero_or_one = Factorial(_lf(0)) if x == 0 else _lf(x)
        if t == 4:
            table = {
                0: lambda: _b(ADD, zero_or_one, c(3)), 1: lambda: _b(ADD, zero_or_one, c(3)),
                2: lambda: _b(ADD, _lf(2), c(2)), 3: lambda: _b(ADD, _lf(3), c(1)),
                4: lambda: _b(MUL, _lf(4), c(1)), 5: lambda: _b(SUB, _lf(5), c(1)),
                6: lambda: _b(SUB, _lf(6), c(2)), 7: lambda: _b(SUB, _lf(7), c(3)),
                8: lambda: _b(DIV, _lf(8), c(2)),
            }
        else:
            table = {
                0: lambda: _b(SUB, c(6), zero_or_one), 1: lambda: _b(SUB, c(6), zero_or_one),
                2: lambda: _b(ADD, _lf(2), c(3)), 3: lambda: _b(ADD, _lf(3), c(2)),
                4: lambda: _b(ADD, _lf(4), c(1)), 5: lambda: _b(MUL, _lf(5), c(1)),
                6: lambda: _b(SUB, _lf(6), c(1)), 7: lambda: _b(SUB, _lf(7), c(2)),
                8: lambda: _b(SUB, _lf(8), c(3)),
            }
        return table[x]()
    n9 = [_lf(9)] * 7
    if t == 4:
        return _b(SUB, _b(ADD, _b(DIV, _add(*n9[:4]), n9[4]), n9[5]), n9[6])
    inner = _b(MUL, n9[0], n9[1])
    for e in n9[2:6]:
        inner = _b(SUB, inner, e)
    return _b(DIV, inner, n9[6])


def lemma_condense(t: int, s) -> Expr:
    """A witness for ``t`` in 1..6 using every digit of ``s``.

    Requires ``|s| >= BASE_DELTA[t]``; bigger multisets are first reduced by
    pairwise subtraction.
    """
    if t not in BASE_DELTA:
        raise ValueError(f"no constructive lemma for {t}")
    ms = as_multiset(s)
    need = BASE_DELTA[t]
    if ms.size < need:
        raise ValueError(f"condensing {t} needs at least {need} digits, got {ms.size}")
    if ms.size > need:
        small, steps = reduce_multiset(ms, need)
        return splice_reduction(_lemma_base(t, small), steps)
    return _lemma_base(t, ms)


@lru_cache(maxsize=32768)
def _lemma_base(t: int, ms: DigitMultiset) -> Expr:
    if t == 1:
        return _one4(ms)
    if t == 2:
        return _two5(ms)
    if t == 3:
        return _three6(ms)
    if t == 6:
        return Factorial(_three6(ms))
    return _four_or_five7(t, ms)


def condense_zero(s) -> Expr:
    """0 from at least eight digits, as (1 from one half) - (1 from the other)."""
    ms = as_multiset(s)
    if ms.size < 8:
        raise ValueError(f"condensing 0 needs at least 8 digits, got {ms.size}")
    digits = ms.digits()
    half = (len(digits) + 1) // 2
    left, right = DigitMultiset.of(digits[:half]), DigitMultiset.of(digits[half:])
    return _b(SUB, lemma_condense(1, left), lemma_condense(1, right))


def exceptional_triples() -> frozenset[tuple[int, int, int]]:
    """Digit triples the case analysis for triples cannot turn into 1."""
    return frozenset(tuple(ms.digits()) for ms in all_multisets(3)
                     if one_from_triple(ms) is None)


# ----- upper bounds on δ(n) ---------------------------------------------------

@dataclass(frozen=True)
class BoundEntry:
    bound: int
    kind: str  # "base", "sum" or "product"
    a: int = 0
    b: int = 0


class BoundTable(dict):
    """``n -> BoundEntry``; each split entry cites the two parts it combines."""

    def bound(self, n: int) -> int:
        return self[n].bound

    def bounds(self) -> dict[int, int]:
        return {n: e.bound for n, e in self.items()}


def dp_delta_bounds(max_n: int) -> BoundTable:
    """Best bound from the base table by combining parts as sums or products."""
    if max_n < 6:
        raise ValueError("max_n must be at least 6")
    table = BoundTable((n, BoundEntry(d, "base")) for n, d in BASE_DELTA.items())
    for n in range(7, max_n + 1):
        best = None
        for a in range(1, n // 2 + 1):
            v = table[a].bound + table[n - a].bound
            if best is None or v < best.bound:
                best = BoundEntry(v, "sum", a, n - a)
        for a in range(2, math.isqrt(n) + 1):
            if n % a == 0:
                v = table[a].bound + table[n // a].bound
                if v < best.bound:
                    best = BoundEntry(v, "product", a, n // a)
        table[n] = best
    return table


def base6_digits(n: int) -> list[int]:
    """Base-6 digits of ``n``, least significant first."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    while n:
        n, r = divmod(n, 6)
        out.append(r)
    return out


def _mpf_to_fraction(raw) -> Fraction:
    man, exp = mpf(raw).man_exp
    return Fraction(man) * Fraction(2) ** exp


def interval(expr, dps: int = 40) -> tuple[Fraction, Fraction]:
    """Rigorous rational enclosure of ``expr(iv)`` evaluated in interval arithmetic."""
    saved = iv.dps
    iv.dps = dps
    try:
        x = expr(iv)
        lo, hi = x._mpi_
        return _mpf_to_fraction(lo), _mpf_to_fraction(hi)
    finally:
        iv.dps = saved


def log_bound_interval(n: int) -> tuple[Fraction, Fraction]:
    """Enclosure of 13·log_6(n) + 7."""
    if n < 1:
        raise ValueError("n must be positive")
    return interval(lambda m: 13 * m.log(m.mpf(n)) / m.log(m.mpf(6)) + 7)


def log_bound(n: int) -> Fraction:
    """A rational upper bound on 13·log_6(n) + 7, tight to far below 1e-6."""
    if n == 1:
        return Fraction(7)
    lo, hi = log_bound_interval(n)
    assert hi - lo < Fraction(1, 10**6)
    return hi
