"""Digit dynamics of 5^n: the per-position digit streams and their cycles.

Position k (0 = units) of 5^(n+1) is ``5·P(d) + floor(e/2)``, where d and e
are positions k and k-1 of 5^n and P is parity.  The stream generator uses
only this rule.  Parity obeys ``P(next) = P(d) xor P(floor(e/2))``, so a
whole stream is a prefix-xor of the stream below it, which lets numpy
produce millions of entries per position at once.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass

import numpy as np

from .pow5 import pow5_text


def _next_row(prev: np.ndarray) -> np.ndarray:
    """Digits at position j for n = 1..N given the digits at position j-1."""
    half = prev[:-1] >> 1
    parity = np.zeros(prev.shape[0], dtype=np.uint8)  # position j of 5^1 is 0
    parity[1:] = np.bitwise_xor.accumulate(half & 1)
    row = np.zeros_like(prev)
    row[1:] = 5 * parity[:-1] + half
    return row


@dataclass(frozen=True)
class DigitStream:
    k: int
    entries: np.ndarray  # entries[i] is digit k of 5^(i+1)

    def __getitem__(self, n: int) -> int:
        """Digit k of 5^n (n >= 1)."""
        if n < 1:
            raise IndexError("streams start at 5^1")
        return int(self.entries[n - 1])

    def __len__(self) -> int:
        return self.entries.shape[0]


def digit_streams(k: int, n_max: int) -> np.ndarray:
    """Array of shape (k+1, n_max): row j holds digit j of 5^1 .. 5^n_max."""
    rows = np.empty((k + 1, n_max), dtype=np.uint8)
    rows[0] = 5
    for j in range(1, k + 1):
        rows[j] = _next_row(rows[j - 1])
    return rows


def digit_stream(k: int, n_max: int) -> DigitStream:
    """Digit k of 5^1 .. 5^n_max, keeping only one row in memory at a time."""
    if k < 0 or n_max < 1:
        raise ValueError("need k >= 0 and n_max >= 1")
    row = np.full(n_max, 5, dtype=np.uint8)
    for _ in range(k):
        row = _next_row(row)
    return DigitStream(k, row)


def step_digits(digits: list[int]) -> list[int]:
    """One application of the rule to positions 0..len-1 (pure Python)."""
    return [5 * (d & 1) + (digits[j - 1] >> 1 if j else 0) for j, d in enumerate(digits)]


def digit_oracle(k: int, n: int) -> int:
    """Digit k of 5^n by modular exponentiation."""
    return pow(5, n, 10 ** (k + 1)) // 10**k


class CycleVerificationError(AssertionError):
    def __init__(self, k: int, n: int, what: str):
        self.k, self.n = k, n
        super().__init__(f"S_{k}: {what} fails at n = {n}")


@dataclass(frozen=True)
class CycleReport:
    k: int
    start_index: int            # earliest n from which the stream is periodic
    length: int
    counts: tuple[int, ...]     # occurrences of each digit over one period
    leading_zero_count: int     # zeros at the start of the cycle (from n = k+1)
    half_period_shift_verified: bool

    def to_json(self) -> dict:
        return {"k": self.k, "start": self.start_index, "length": self.length,
                "counts": list(self.counts), "leading_zeros": self.leading_zero_count,
                "verified": self.half_period_shift_verified}


def cycle_report(k: int) -> CycleReport:
    """Verify S_k repeats with period 2^(k-1) from n = k+1 on, and that
    shifting by half a period changes every digit by exactly 5."""
    if not 2 <= k <= 24:
        raise ValueError("k must lie in [2, 24]")
    length = 1 << (k - 1)
    half = length >> 1
    first = k + 1
    s = digit_stream(k, k + 2 * length).entries
    window = s[first - 1:first - 1 + length]
    repeat = s[first - 1 + length:first - 1 + 2 * length]
    bad = np.flatnonzero(window != repeat)
    if bad.size:
        raise CycleVerificationError(k, first + int(bad[0]), "periodicity")
    shifted = s[first - 1 + half:first - 1 + half + length].astype(np.int16)
    bad = np.flatnonzero(np.abs(shifted - window) != 5)
    if bad.size:
        raise CycleVerificationError(k, first + int(bad[0]), "half-period shift")
    start = first
    while start > 1 and s[start - 2] == s[start - 2 + length]:
        start -= 1
    nonzero = np.flatnonzero(window)
    zeros = int(nonzero[0]) if nonzero.size else length
    counts = tuple(int(c) for c in np.bincount(window, minlength=10))
    return CycleReport(k, start, length, counts, zeros, True)


CONTRIBUTION = np.array([[1 if i in (j // 2, j // 2 + 5) else 0 for j in range(10)]
                         for i in range(10)], dtype=np.int64)
SEED = np.eye(10, dtype=np.int64)[2]


def predicted_counts(k: int) -> list[int]:
    """A^(k-1)·u: digit counts over one cycle of S_k."""
    if k < 1:
        raise ValueError("k must be positive")
    v = SEED.astype(object)
    a = CONTRIBUTION.astype(object)
    for _ in range(k - 1):
        v = a.dot(v)
    return [int(x) for x in v]


PARITY_FLIP_DIGITS = (2, 3, 6, 7)


@dataclass
class Mod2Orbit:
    residues: dict[int, tuple[int, ...]]  # k -> v_k mod 2 (k = 1 is the seed)
    period: int
    period_start: int
    flip_sums: dict[int, int]            # k -> sum of residues at digits 2, 3, 6, 7

    @property
    def all_flip_sums_odd(self) -> bool:
        return all(s % 2 == 1 for s in self.flip_sums.values())

    def as_dict(self) -> dict:
        return asdict(self)


def mod2_orbit(k_max: int) -> Mod2Orbit:
    """Orbit of the seed under the contribution matrix over GF(2)."""
    if k_max < 7:
        raise ValueError("k_max must be at least 7")
    residues = {1: tuple(int(x) for x in SEED % 2)}
    v = SEED % 2
    for k in range(2, k_max + 1):
        v = CONTRIBUTION.dot(v) % 2
        residues[k] = tuple(int(x) for x in v)
    start = 3
    period = next(p for p in range(1, k_max - start + 1)
                  if all(residues[k] == residues[k + p] for k in range(start, k_max - p + 1)))
    sums = {k: sum(r[d] for d in PARITY_FLIP_DIGITS) for k, r in residues.items()}
    return Mod2Orbit(residues, period, start, sums)


def floor_k_log5_10(k: int) -> int:
    """floor(k·log5 10): the largest m with 5^m <= 10^k."""
    m, p, target = 0, 1, 10**k
    while p * 5 <= target:
        p *= 5
        m += 1
    return m


def leading_zeros_bound_check(k: int) -> tuple[int, int, bool]:
    """(observed leading zeros of C_k, guaranteed floor(k·log5 10) - k, ok)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    bound = floor_k_log5_10(k) - k
    s = digit_stream(k, k + 1 + bound + 1).entries
    observed = 0
    for n in range(k + 1, len(s) + 1):
        if s[n - 1]:
            break
        observed += 1
    else:
        # ran out of computed entries; the cycle itself bounds the run
        observed = cycle_report(k).leading_zero_count
    return observed, bound, observed >= bound


class ZeroRun(tuple):
    """(length, position) of the longest zero run; position is the index,
    counted from the units digit, of the run's first (most significant) zero."""

    def __new__(cls, length: int, position: int | None):
        return super().__new__(cls, (length, position))

    @property
    def length(self) -> int:
        return self[0]

    @property
    def position(self) -> int | None:
        return self[1]


_ZEROS = re.compile("0+")


def longest_zero_run(text: str) -> ZeroRun:
    best = None
    for m in _ZEROS.finditer(text):
        if best is None or m.end() - m.start() > best.end() - best.start():
            best = m
    if best is None:
        return ZeroRun(0, None)
    return ZeroRun(best.end() - best.start(), len(text) - 1 - best.start())


def max_zero_run(n: int) -> ZeroRun:
    """Longest run of zeros in 5^n; ties go to the most significant run."""
    if n < 1:
        raise ValueError("n must be positive")
    return longest_zero_run(pow5_text(n))


def first_exponent_with_run(r: int, n_limit: int = 10_000) -> int | None:
    """Smallest n <= n_limit such that 5^n contains r zeros in a row."""
    if r < 1:
        raise ValueError("r must be positive")
    needle = "0" * r
    x = 1
    for n in range(1, n_limit + 1):
        x *= 5
        if needle in (str(x) if n < 3000 else pow5_text(n)):
            return n
    return None


class MonotonicityError(AssertionError):
    pass


def zero_run_witnesses(m_max: int) -> list[tuple[int, int, int, int | None]]:
    """(m, n = m + 2^m + 2, longest zero run of 5^n, its position) for m = 2..m_max."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    rows = []
    for m in range(2, m_max + 1):
        n = m + (1 << m) + 2
        run = max_zero_run(n)
        if rows and run.length < rows[-1][2]:
            raise MonotonicityError(f"zero run shrinks from m={m - 1} to m={m}")
        rows.append((m, n, run.length, run.position))
    return rows
