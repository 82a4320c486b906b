import numpy as np
import pytest
from hypothesis import given, strategies as st

from condense.cycles import (
    CONTRIBUTION, SEED, cycle_report, digit_oracle, digit_stream, digit_streams,
    first_exponent_with_run, floor_k_log5_10, leading_zeros_bound_check, longest_zero_run,
    max_zero_run, mod2_orbit, predicted_counts, step_digits, zero_run_witnesses,
)

DISPLAYED_MATRIX = [
    [1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
] * 2

# longest zero runs of 5^(m + 2^m + 2), m = 2..18, as printed with the digits
RUNS_M2_TO_M18 = (1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 5, 5, 5, 6)


def test_stream_examples():
    assert tuple(digit_stream(2, 8).entries) == (0, 0, 1, 6, 1, 6, 1, 6)
    assert set(digit_stream(0, 50).entries) == {5}
    assert tuple(digit_stream(3, 12).entries) == (0, 0, 0, 0, 3, 5, 8, 0, 3, 5, 8, 0)
    assert digit_stream(3, 12)[5] == 3


def test_oracle_examples():
    assert digit_oracle(2, 3) == 1
    assert digit_oracle(4, 8) == 9
    assert digit_oracle(10, 1) == 0


def test_recurrence_equals_oracle_in_bulk():
    n_max = 10_000
    rows = digit_streams(12, n_max)
    x, mod = 1, 10**13
    for n in range(1, n_max + 1):
        x = x * 5 % mod
        expected = [(x // 10**k) % 10 for k in range(13)]
        assert rows[:, n - 1].tolist() == expected, n


@given(st.integers(0, 30), st.integers(1, 3000))
def test_recurrence_equals_modular_power(k, n):
    assert digit_stream(k, n)[n] == digit_oracle(k, n)


def test_single_step_rule():
    digits = [5] + [0] * 11
    x = 5
    for _ in range(30):
        digits = step_digits(digits)
        x = x * 5 % 10**12
        assert digits == [(x // 10**k) % 10 for k in range(12)]


def test_cycle_examples():
    r2 = cycle_report(2)
    assert r2.start_index <= 3 and r2.length == 2
    assert r2.counts == (0, 1, 0, 0, 0, 0, 1, 0, 0, 0)
    r3 = cycle_report(3)
    assert r3.length == 4 and r3.counts == (1, 0, 0, 1, 0, 1, 0, 0, 1, 0)
    assert r3.to_json() == {"k": 3, "start": 4, "length": 4, "counts": [1, 0, 0, 1, 0, 1, 0, 0, 1, 0],
                            "leading_zeros": 1, "verified": True}
    r10 = cycle_report(10)
    assert r10.length == 512 and list(r10.counts) == predicted_counts(10)
    with pytest.raises(ValueError):
        cycle_report(1)


@pytest.mark.parametrize("k", range(2, 21))
def test_cycle_law(k):
    rep = cycle_report(k)
    assert rep.length == 2 ** (k - 1)
    assert rep.start_index <= k + 1
    assert rep.half_period_shift_verified
    assert sum(rep.counts) == rep.length
    assert list(rep.counts) == predicted_counts(k)


def test_half_period_shift_directly():
    k = 9
    length = 2 ** (k - 1)
    s = digit_stream(k, k + 2 * length).entries.astype(int)
    window = s[k:k + length]
    shifted = s[k + length // 2:k + length // 2 + length]
    assert set(np.abs(shifted - window)) == {5}


def test_contribution_matrix():
    assert CONTRIBUTION.tolist() == DISPLAYED_MATRIX
    assert CONTRIBUTION.sum(axis=0).tolist() == [2] * 10
    assert SEED.tolist() == [0, 0, 1, 0, 0, 0, 0, 0, 0, 0]


def test_predicted_counts():
    assert predicted_counts(2) == [0, 1, 0, 0, 0, 0, 1, 0, 0, 0]
    assert predicted_counts(3) == [1, 0, 0, 1, 0, 1, 0, 0, 1, 0]
    for k in range(1, 40):
        assert sum(predicted_counts(k)) == 2 ** (k - 1)


def test_mod2_orbit():
    orb = mod2_orbit(20)
    assert orb.residues[3] == orb.residues[7]
    assert orb.period == 4 and orb.period_start == 3
    assert [orb.flip_sums[k] for k in range(1, 8)] == [1, 1, 1, 3, 1, 3, 1]
    assert orb.residues[4] == (1, 1, 1, 0, 1, 1, 1, 1, 0, 1)
    assert all(orb.flip_sums[k] % 2 == 1 for k in range(3, 21))
    assert orb.all_flip_sums_odd
    for k in range(2, 21):
        assert orb.residues[k] == tuple(c % 2 for c in predicted_counts(k))


def test_leading_zeros():
    assert leading_zeros_bound_check(3) == (1, 1, True)
    assert leading_zeros_bound_check(2) == (0, 0, True)
    obs, bound, ok = leading_zeros_bound_check(10)
    assert bound == 4 and ok
    for k in range(2, 21):
        assert leading_zeros_bound_check(k)[2]


@given(st.integers(1, 200))
def test_floor_log_is_exact(k):
    m = floor_k_log5_10(k)
    assert 5**m <= 10**k < 5 ** (m + 1)


def test_zero_runs():
    assert max_zero_run(8).length == 1
    assert max_zero_run(39).length == 2
    assert max_zero_run(67).length == 3
    assert max_zero_run(2) == (0, None)
    assert longest_zero_run("100100") == (2, 4)   # leftmost of two equal runs
    assert max_zero_run(39).position == 6


def test_first_runs():
    assert [first_exponent_with_run(r) for r in range(1, 5)] == [8, 39, 67, 228]
    assert first_exponent_with_run(4, 100) is None


def test_zero_run_witnesses():
    rows = zero_run_witnesses(18)
    assert [r[1] for r in rows[:13]] == [8, 13, 22, 39, 72, 137, 266, 523, 1036, 2061, 4110, 8207, 16400]
    assert tuple(r[2] for r in rows) == RUNS_M2_TO_M18
    assert rows[3][:3] == (5, 39, 2)
    assert rows[10][:3] == (12, 4110, 4)
    assert rows[16][:3] == (18, 262164, 6)
    with pytest.raises(ValueError):
        zero_run_witnesses(1)
