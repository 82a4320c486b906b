from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from condense.arith import ADD, DIV, MUL, POW, SUB, RuleSet
from condense.expr import (
    Binary, DigitMultiset, EvaluationError, Factorial, Leaf, MultiDigitLiteral, ParseError,
    evaluate, leaves, parse, render, size, try_evaluate,
)


def test_multiset_algebra():
    a = DigitMultiset.of([7, 6, 2])
    b = DigitMultiset.of([3, 7, 7, 2])
    assert a + b == DigitMultiset.of([2, 2, 3, 6, 7, 7, 7])
    assert DigitMultiset.of([2, 6, 2, 7, 7, 2]) - a == DigitMultiset.of([2, 2, 7])
    with pytest.raises(ValueError):
        a - b
    s = DigitMultiset.of("2236777")
    assert s.support() == frozenset({2, 3, 6, 7})
    assert s.size == 7 and len(s) == 7
    assert repr(DigitMultiset.of(52)) == "{2,5}"
    assert DigitMultiset.of("390625").counts == (1, 0, 1, 1, 0, 1, 1, 0, 0, 1)


def test_evaluate_examples():
    assert evaluate(parse("(2+1^8)^7")) == 2187
    assert evaluate(parse("(4+4/4)!/4")) == 30
    assert evaluate(parse("0!+1")) == 2
    assert evaluate(parse("(9-8)^7")) == 1
    assert evaluate(parse("2/5")) == Fraction(2, 5)


def test_leaves_examples():
    assert leaves(parse("(2+1^8)^7")) == DigitMultiset.of([1, 2, 7, 8])
    assert leaves(Leaf(5)) == DigitMultiset.of([5])
    assert leaves(parse("(4+4/4)!/4")) == DigitMultiset.of([4, 4, 4, 4])
    assert size(parse("0!!")) == 1


def test_render_examples():
    e = Binary(POW, Binary(ADD, Leaf(2), Binary(POW, Leaf(1), Leaf(8))), Leaf(7))
    assert render(e) == "(2+1^8)^7"
    assert render(Factorial(Leaf(0))) == "0!"
    assert render(Binary(SUB, Leaf(9), Binary(SUB, Leaf(3), Leaf(5)))) == "9-(3-5)"
    assert render(Binary(POW, Leaf(2), Binary(POW, Leaf(3), Leaf(2)))) == "2^3^2"
    assert render(Binary(POW, Binary(POW, Leaf(2), Leaf(3)), Leaf(2))) == "(2^3)^2"
    assert render(Factorial(Binary(ADD, Leaf(2), Leaf(3)))) == "(2+3)!"
    assert render(Binary(POW, Factorial(Leaf(3)), Leaf(2))) == "3!^2"


def test_parse_errors():
    with pytest.raises(MultiDigitLiteral):
        parse("33+3")
    with pytest.raises(ParseError) as info:
        parse("5^")
    assert info.value.position == 2
    for bad in ["", "(1+2", "1+2)", "-1", "1 2", "a"]:
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_precedence_and_whitespace():
    assert evaluate(parse("2 ^ 3 ^ 2")) == 512
    assert evaluate(parse("9-3-5")) == 1
    assert evaluate(parse("8/2/2")) == 2
    assert evaluate(parse("3!!")) == 720
    assert parse("2+3*4") == Binary(ADD, Leaf(2), Binary(MUL, Leaf(3), Leaf(4)))


def test_evaluation_errors_carry_position():
    with pytest.raises(EvaluationError) as info:
        evaluate(parse("1+(2/(3-3))"))
    assert info.value.path == (1,)
    assert render(info.value.subtree) == "2/(3-3)"
    assert try_evaluate(parse("2/0")) is None
    assert try_evaluate(parse("0!"), rules=RuleSet(zero_fact_is_one=False)) is None


def test_leaf_validation():
    with pytest.raises(ValueError):
        Leaf(10)
    with pytest.raises(ValueError):
        Binary("%", Leaf(1), Leaf(2))


def trees(max_leaves=6):
    leaf = st.integers(0, 9).map(Leaf)
    return st.recursive(
        leaf,
        lambda kids: st.one_of(
            st.builds(Binary, st.sampled_from([ADD, SUB, MUL, DIV, POW]), kids, kids),
            kids.map(Factorial)),
        max_leaves=max_leaves)


@settings(max_examples=400)
@given(trees())
def test_round_trip(e):
    assert parse(render(e)) == e


@settings(max_examples=300)
@given(trees())
def test_render_preserves_value(e):
    assert try_evaluate(parse(render(e))) == try_evaluate(e)
    assert leaves(parse(render(e))) == leaves(e)
