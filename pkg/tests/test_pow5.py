import math
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from condense.expr import DigitMultiset, evaluate, leaves, parse
from condense.fixtures import load_fixtures
from condense.pow5 import (
    InsufficientDigits, SelfWitness, condense_by_base6, condense_by_table, digit_count,
    digit_histogram, horner_budget, pow5_decimal, pow5_text, prove_selfcondensable,
    validate_selfcondensing, verify_thresholds, zero_fraction,
)


def test_decimal_examples():
    assert pow5_decimal(8).text == "390625"
    assert pow5_decimal(1).digits == (5,)
    assert pow5_decimal(13).text == "1220703125"
    assert pow5_decimal(8).multiset == DigitMultiset.of("390625")
    with pytest.raises(ValueError):
        pow5_decimal(0)


def test_large_powers_agree_with_integers():
    old = sys.get_int_max_str_digits() if hasattr(sys, "get_int_max_str_digits") else None
    if old is not None:
        sys.set_int_max_str_digits(0)
    try:
        for n in (2999, 3000, 3001, 7777, 20000):
            assert pow5_text(n) == str(5**n)
    finally:
        if old is not None:
            sys.set_int_max_str_digits(old)


@given(st.integers(1, 6000))
def test_digit_length_law(n):
    # floor(n*log10 5) + 1 digits: 10^(L-1) <= 5^n < 10^L
    length = digit_count(n)
    assert 10 ** (length - 1) <= 5**n < 10**length


def test_trailing_five():
    assert all(pow5_text(n)[-1] == "5" for n in range(1, 5001))
    assert pow5_text(300000)[-1] == "5"


def test_histograms():
    assert digit_histogram(1430) == [98, 97, 89, 92, 94, 104, 114, 91, 115, 106]
    assert sum(digit_histogram(1430)) == 1000
    assert digit_histogram(2) == [0, 0, 1, 0, 0, 1, 0, 0, 0, 0]
    assert digit_histogram(45)[0] == 7 and digit_count(45) == 32
    assert zero_fraction(45) == Fraction(7, 32)


def test_prove_examples():
    w4 = prove_selfcondensable(4)
    assert w4.identity == "625 = 5^(6-2)"
    w8 = prove_selfcondensable(8)
    assert evaluate(w8.exponent_expr) == 8
    assert leaves(w8.exponent_expr) == DigitMultiset.of([3, 9, 0, 6, 2])
    assert validate_selfcondensing(100, prove_selfcondensable(100))
    w1 = prove_selfcondensable(1)
    assert w1.exponent_expr is None and w1.identity == "5 = 5"


def test_prover_is_total_to_500():
    for n in range(1, 501):
        assert validate_selfcondensing(n, prove_selfcondensable(n)), n


@pytest.mark.parametrize("n", [1000, 5000, 20000])
def test_prover_large(n):
    w = prove_selfcondensable(n)
    assert w.method == "base6"
    assert validate_selfcondensing(n, w)


def test_validation_reasons():
    assert validate_selfcondensing(2, SelfWitness(2, 0, parse("2")))
    assert validate_selfcondensing(3, SelfWitness(3, 0, parse("1+2")))
    bad = validate_selfcondensing(4, SelfWitness(4, 0, parse("2+2")))
    assert not bad and bad.reason == "multiset mismatch"
    off = validate_selfcondensing(4, SelfWitness(4, 0, parse("6*2")))
    assert not off and off.reason == "value mismatch"
    assert not validate_selfcondensing(2, SelfWitness(2, 0, None))


def test_table_rows_use_own_digits():
    rows = [f for f in load_fixtures() if f.tag == "selfcondense"]
    assert [f.expected for f in rows] == [2, 3, 4, 5, 6, 7, 8, 10]
    for f in rows:
        n = f.expected
        assert validate_selfcondensing(n, SelfWitness(n, 0, f.expr))


def test_constructions_directly():
    rest = pow5_decimal(300).multiset - DigitMultiset.of([5])
    assert horner_budget(300) <= rest.size
    w = condense_by_base6(300, rest)
    assert evaluate(w) == 300 and leaves(w) == rest
    w = condense_by_table(27, [0, 1, 2, 3, 4, 5, 6, 7, 8, 9] * 2)
    assert evaluate(w) == 27
    with pytest.raises(InsufficientDigits):
        condense_by_base6(100, [1, 2, 3])
    with pytest.raises(InsufficientDigits):
        condense_by_table(100, [1, 2, 3])


@settings(max_examples=40, deadline=None)
@given(st.integers(7, 400), st.lists(st.integers(0, 9), min_size=60, max_size=80))
def test_base6_construction_on_random_digits(n, digits):
    w = condense_by_base6(n, digits)
    assert evaluate(w) == n and leaves(w) == DigitMultiset.of(digits)


def test_thresholds():
    rep = verify_thresholds()
    assert rep.crossover == 53 and rep.holds_at_53 and rep.fails_at_52 and rep.table_ok and rep.ok
    assert math.floor(rep.left[53][0] * 1000) == 35806
    assert math.floor(rep.right[53][0] * 1000) == 36045   # 53*log10(5) - 1 = 36.0454...
    assert rep.table_rows[24] == (13, 16)
