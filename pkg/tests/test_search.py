import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from condense.arith import RuleSet, SearchCaps
from condense.bounds import lemma_condense
from condense.expr import DigitMultiset, Leaf, evaluate, leaves, parse, render
from condense.search import (
    CACHE_HEADER, Condenser, all_multisets, certify, contains, e_k_members, enumerate_witnesses,
    load_certificates, partitions, reduce_multiset, save_certificates, splice_reduction,
    submultisets, value_set,
)

ms_st = st.lists(st.integers(0, 9), min_size=1, max_size=3).map(DigitMultiset.of)


def valid(w, ms, t, caps=None, rules=None):
    return w is not None and evaluate(w, caps, rules) == t and leaves(w) == ms


def test_value_set_of_two_and_five():
    table = value_set([2, 5])
    for v in [7, -3, 3, 10, Fraction(2, 5), Fraction(5, 2), 32, 25, 5040]:
        assert v in table
        assert valid(table.witness(v), DigitMultiset.of([2, 5]), v)


def test_bare_factorial_of_five_needs_the_two_as_well():
    # 5! alone leaves the 2 unused, so 120 is not condensable from {2, 5}
    assert 120 not in value_set([2, 5])


def test_singleton_table():
    table = value_set([5])
    assert table.witness(5) == Leaf(5)
    assert 120 in table
    assert all(leaves(w) == DigitMultiset.of([5]) for _, w in table.items())


def test_thirteen_from_two_three_five():
    assert valid(contains([2, 3, 5], 13), DigitMultiset.of([2, 3, 5]), 13)


def test_thirty_from_four_fours():
    assert valid(contains([4, 4, 4, 4], 30), DigitMultiset.of([4] * 4), 30)


def test_two_three_seven_does_not_reach_237():
    assert contains([2, 3, 7], 237) is None


@pytest.mark.parametrize("d", [2, 4, 5, 7, 9])
def test_hundred_from_six_identical_digits(d):
    assert valid(contains([d] * 6, 100), DigitMultiset.of([d] * 6), 100)


def test_enumerate_witnesses():
    ws = enumerate_witnesses([2, 3, 5], 13, limit=3)
    assert len({render(w) for w in ws}) == 3
    assert all(valid(w, DigitMultiset.of([2, 3, 5]), 13) for w in ws)
    assert enumerate_witnesses([5], 5, limit=10) == [Leaf(5)]
    tens = enumerate_witnesses([2, 5], 10, limit=2)
    assert {"2*5", "5*2"} & {render(w) for w in tens}
    with pytest.raises(ValueError):
        enumerate_witnesses([2], 2, limit=0)


def test_e_k_examples():
    assert 1 in e_k_members(4, 1, 1)
    assert 2 in e_k_members(5, 2, 2)
    assert e_k_members(1, 0, 9) == {}


def test_e_k_grows_with_k():
    members = {k: set(e_k_members(k, 1, 3)) for k in (4, 5, 6, 7)}
    for k in (4, 5, 6):
        assert members[k] <= members[k + 1]


def test_certificate_validates():
    cert = certify(1, 4)
    assert cert.complete() and cert.validate()
    assert certify(1, 3) is None  # some triples do not reach 1


def test_reduce_examples():
    assert reduce_multiset([7, 7, 3], 2) == (DigitMultiset.of([0, 3]), [(7, 7, 0)])
    assert reduce_multiset([9] * 7, 7) == (DigitMultiset.of([9] * 7), [])
    assert reduce_multiset([5, 2], 1)[0] == DigitMultiset.of([3])
    with pytest.raises(ValueError):
        reduce_multiset([1, 2], 3)


@settings(max_examples=150)
@given(st.lists(st.integers(0, 9), min_size=2, max_size=40), st.integers(1, 3))
def test_splice_soundness(digits, target_size):
    ms = DigitMultiset.of(digits)
    target_size = min(target_size, ms.size)
    reduced, steps = reduce_multiset(ms, target_size)
    assert reduced.size == target_size
    table = value_set(reduced)
    for v in sorted(table.values())[:5]:
        w = splice_reduction(table.witness(v), steps)
        assert valid(w, ms, v)


def test_splice_keeps_zero_chains_shallow():
    ms = DigitMultiset.of([7] + [0] * 3000)
    reduced, steps = reduce_multiset(ms, 1)
    w = splice_reduction(Leaf(7), steps)
    assert reduced == DigitMultiset.of([7])
    assert valid(w, ms, 7)


@settings(max_examples=60, deadline=None)
@given(ms_st)
def test_caps_monotonicity(ms):
    small = Condenser(SearchCaps(1000, 100, 6, 8))
    big = Condenser()
    assert set(small.table(ms).values()) <= set(big.table(ms).values())


@settings(max_examples=60, deadline=None)
@given(ms_st)
def test_table_witnesses_use_every_digit(ms):
    for v, w in value_set(ms).items():
        assert leaves(w) == ms


def test_search_and_construction_agree_on_one_from_four():
    eng = Condenser(use_lemmas=False)
    for ms in all_multisets(4):
        assert valid(eng.find(ms, 1), ms, 1)
        assert valid(lemma_condense(1, ms), ms, 1)


@pytest.mark.parametrize("t", [1, 2, 3, 4, 5, 6])
def test_inverse_search_matches_full_table(t):
    # the target-directed search must agree with the exhaustive closure
    rng = random.Random(t)
    eng = Condenser(use_lemmas=False)
    for _ in range(40):
        ms = DigitMultiset.of([rng.randrange(10) for _ in range(3)])
        w = eng.find(ms, t)
        assert (w is not None) == (t in eng.table(ms))


def test_restricted_rules():
    no_fact = RuleSet.parse("-fact")
    w = contains([2, 3, 5], 13, rules=no_fact)
    assert valid(w, DigitMultiset.of([2, 3, 5]), 13, rules=no_fact)
    assert "!" not in render(w)
    assert contains([0, 0], 1, rules=RuleSet(zero_fact_is_one=False, zero_pow_zero_is_one=False)) is None
    assert render(contains([0, 0], 1, rules=RuleSet(zero_fact_is_one=False))) == "0^0"


def test_node_budget():
    eng = Condenser(use_lemmas=False)
    ms = DigitMultiset.of([7, 8, 9, 7, 8, 9, 7, 9])
    w = eng.find(ms, 97, max_nodes=1)
    assert w is None or valid(w, ms, 97)
    assert valid(eng.find(ms, 97), ms, 97)


def test_partitions_are_unordered_and_complete():
    key = DigitMultiset.of([1, 1, 2, 3]).counts
    parts = list(partitions(key))
    as_sets = {frozenset([a, b]) for a, b in parts}
    assert len(as_sets) == len(parts)
    assert all(tuple(x + y for x, y in zip(a, b)) == key for a, b in parts)
    assert len(list(submultisets(key, 2))) == 4  # {1,1} {1,2} {1,3} {2,3}


def test_certificate_cache_round_trip(tmp_path):
    eng = Condenser()
    for ms in ([2, 3, 5], [4, 4, 4, 4]):
        eng.find(ms, 13)
    path = tmp_path / "cache.txt"
    save_certificates(path, eng.certificates())
    assert path.read_text().splitlines()[0] == CACHE_HEADER
    records = load_certificates(path)
    assert records
    fresh = Condenser()
    assert fresh.seed(records) == len(records)
    bogus = [(DigitMultiset.of([2, 3]).counts, 7, parse("2*3"))]
    assert fresh.seed(bogus) == 0
    assert load_certificates(tmp_path / "missing.txt") == []
    (tmp_path / "bad.txt").write_text("not a cache\n")
    with pytest.raises(ValueError):
        load_certificates(tmp_path / "bad.txt")
