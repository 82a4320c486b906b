"""Reference values and the end-to-end verification sweep.

Each check recomputes one published result from scratch and compares it with
the frozen value below.  ``run_sweep`` drives them all and reports one
verdict per check, with its wall time against the allowed budget.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable

from .bounds import BASE_DELTA, dp_delta_bounds, lemma_condense
from .cycles import (
    cycle_report, digit_streams, first_exponent_with_run, leading_zeros_bound_check,
    mod2_orbit, predicted_counts, zero_run_witnesses,
)
from .expr import DigitMultiset, evaluate, leaves
from .fixtures import load_fixtures
from .pow5 import digit_histogram, prove_selfcondensable, validate_selfcondensing, verify_thresholds, zero_fraction
from .search import Condenser, all_multisets

REFERENCE_DELTA_BOUNDS = (
    4, 5, 6, 7, 7, 6, 10, 11, 12, 12,
    13, 11, 15, 15, 13, 14, 18, 12, 16, 14,
    16, 18, 19, 13, 14, 18, 18, 17, 20, 13,
    17, 18, 19, 20, 17, 12, 16, 17, 18, 18,
    19, 16, 20, 20, 19, 23, 23, 17, 20, 19,
    23, 22, 24, 18, 20, 21, 22, 25, 25, 18,
)
REFERENCE_FAILING_TRIPLES = frozenset({(4, 6, 8), (4, 7, 9), (5, 7, 9)})
REFERENCE_TRIPLE_SUCCESSES = 217
REFERENCE_HISTOGRAM_1430 = (98, 97, 89, 92, 94, 104, 114, 91, 115, 106)
REFERENCE_FIRST_RUNS = (8, 39, 67, 228)
REFERENCE_CROSSOVER = 53
REFERENCE_CROSSOVER_DECIMALS = ("35.806", "36.054")
REFERENCE_FLIP_SUMS = (1, 1, 1, 3, 1, 3, 1)
REFERENCE_RUN_EXPONENTS = (8, 13, 22, 39, 72, 137, 266, 523, 1036, 2061, 4110, 8207, 16400)
REFERENCE_RUN_LENGTHS = (1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5)
REFERENCE_RUN_M17 = (131091, 5)


@dataclass
class CheckResult:
    number: int
    name: str
    ok: bool
    seconds: float
    budget: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.ok and self.seconds <= self.budget

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        timing = f"{self.seconds:.2f}s / {self.budget:g}s"
        return f"[{verdict}] {self.number:2d} {self.name} ({timing}){': ' + self.detail if self.detail else ''}"


def truncate3(x: Fraction) -> str:
    """x truncated to three decimals, as in `35.806...`."""
    q = math.floor(x * 1000)
    return f"{q // 1000}.{q % 1000:03d}"


def check_fixtures():
    bad = []
    for f in load_fixtures():
        e = f.expr
        if evaluate(e) != f.expected or leaves(e) != f.digits:
            bad.append(f.text)
    return not bad, f"{len(load_fixtures())} records" + (f"; mismatched: {bad}" if bad else "")


def check_triples():
    eng = Condenser(use_lemmas=False)
    failing = {t for t in combinations_with_replacement(range(10), 3)
               if eng.find(DigitMultiset.of(t), 1) is None}
    successes = 220 - len(failing)
    ok = successes == REFERENCE_TRIPLE_SUCCESSES and failing == REFERENCE_FAILING_TRIPLES
    return ok, f"{successes} of 220 condense to 1; not found within caps: {sorted(failing)}"


def check_base_delta_constructive():
    total = 0
    for t in range(1, 7):
        for ms in all_multisets(BASE_DELTA[t]):
            w = lemma_condense(t, ms)
            if evaluate(w) != t or leaves(w) != ms:
                return False, f"bad witness for {t} from {ms}"
            total += 1
    return True, f"{total} constructive witnesses validated"


def check_base_delta_search(samples: int = 100, seed: int = 0):
    rng = random.Random(seed)
    eng = Condenser(use_lemmas=False)
    for t in range(1, 7):
        pool = list(all_multisets(BASE_DELTA[t]))
        for ms in rng.sample(pool, samples):
            w = eng.find(ms, t)
            if w is None or evaluate(w) != t or leaves(w) != ms:
                return False, f"search found no witness for {t} from {ms}"
    return True, f"{6 * samples} random multisets confirmed by search"


def check_delta_table():
    got = tuple(dp_delta_bounds(60).bounds()[n] for n in range(1, 61))
    diff = [(n, g, r) for n, (g, r) in enumerate(zip(got, REFERENCE_DELTA_BOUNDS), start=1) if g != r]
    return not diff, "60 rows match" if not diff else f"mismatches (n, got, expected): {diff}"


def check_crossover():
    rep = verify_thresholds()
    left, right = truncate3(rep.left[53][0]), truncate3(rep.right[53][0])
    ok = (rep.crossover == REFERENCE_CROSSOVER and rep.holds_at_53 and rep.fails_at_52
          and (left, right) == REFERENCE_CROSSOVER_DECIMALS)
    return ok, (f"first n = {rep.crossover}; at 53 left {left}..., right {right}... "
                f"(expected {REFERENCE_CROSSOVER_DECIMALS[0]}..., {REFERENCE_CROSSOVER_DECIMALS[1]}...)")


def check_selfcondensing():
    ns = list(range(1, 501)) + [1000, 5000]
    bad = [n for n in ns if not validate_selfcondensing(n, prove_selfcondensable(n))]
    return not bad, f"{len(ns) - len(bad)} of {len(ns)} exponents witnessed" + (f"; failed {bad[:10]}" if bad else "")


def check_digit_stats():
    hist = tuple(digit_histogram(1430))
    zf = zero_fraction(45)
    ok = hist == REFERENCE_HISTOGRAM_1430 and sum(hist) == 1000 and zf == Fraction(7, 32)
    return ok, f"histogram {list(hist)}, zero fraction of 5^45 = {zf}"


def check_first_runs():
    got = tuple(first_exponent_with_run(r) for r in range(1, 5))
    return got == REFERENCE_FIRST_RUNS, f"first exponents {list(got)}"


def check_cycles():
    for k in range(2, 17):
        rep = cycle_report(k)
        if not (rep.start_index <= k + 1 and rep.length == 2 ** (k - 1)
                and rep.half_period_shift_verified and list(rep.counts) == predicted_counts(k)):
            return False, f"cycle law fails at k={k}"
    n_max = 10_000
    rows = digit_streams(12, n_max)
    mod = 10**13
    x = 1
    for n in range(1, n_max + 1):
        x = x * 5 % mod
        col = rows[:, n - 1]
        y = x
        for k in range(13):
            if col[k] != y % 10:
                return False, f"recurrence disagrees with 5^{n} at position {k}"
            y //= 10
    return True, "k = 2..16 verified; recurrence equals modular powers for k <= 12, n <= 10^4"


def check_mod2():
    orb = mod2_orbit(20)
    sums = tuple(orb.flip_sums[k] for k in range(1, 8))
    ok = (orb.residues[3] == orb.residues[7] and orb.period == 4 and sums == REFERENCE_FLIP_SUMS
          and all(orb.flip_sums[k] % 2 for k in range(3, 21)))
    return ok, f"period {orb.period}; sums for u, v2..v7 = {list(sums)}"


def check_leading_zeros():
    bad = [k for k in range(2, 21) if not leading_zeros_bound_check(k)[2]]
    return not bad, "k = 2..20 satisfy the bound" if not bad else f"fails for k in {bad}"


def check_zero_runs():
    rows = zero_run_witnesses(14)
    ns = tuple(r[1] for r in rows)
    runs = tuple(r[2] for r in rows)
    ext = zero_run_witnesses(17)[-1]
    ok = ns == REFERENCE_RUN_EXPONENTS and runs == REFERENCE_RUN_LENGTHS and (ext[1], ext[2]) == REFERENCE_RUN_M17
    return ok, f"runs for m = 2..14: {list(runs)} (expected {list(REFERENCE_RUN_LENGTHS)}); m=17: n={ext[1]}, run {ext[2]}"


@dataclass
class Check:
    number: int
    name: str
    fn: Callable[[], tuple[bool, str]]
    budget: float


CHECKS = (
    Check(1, "fixture replay", check_fixtures, 1),
    Check(2, "digit triples condensing to 1", check_triples, 10),
    Check(3, "base bounds, constructive", check_base_delta_constructive, 10),
    Check(3, "base bounds, search spot-check", check_base_delta_search, 300),
    Check(4, "bound table to 60", check_delta_table, 1),
    Check(5, "logarithmic crossover", check_crossover, 1),
    Check(6, "selfcondensing powers of five", check_selfcondensing, 120),
    Check(7, "digit statistics", check_digit_stats, 1),
    Check(8, "first zero runs", check_first_runs, 5),
    Check(9, "digit cycles", check_cycles, 60),
    Check(10, "parity orbit", check_mod2, 1),
    Check(11, "leading zeros of cycles", check_leading_zeros, 60),
    Check(12, "growing zero runs", check_zero_runs, 120),
)


def run_check(c: Check) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = c.fn()
    except Exception as exc:  # a crash is a failed check, not a crashed sweep
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(c.number, c.name, ok, time.perf_counter() - t0, c.budget, detail)


@dataclass
class SweepReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)


def run_sweep(only: set[int] | None = None, on_result=None) -> SweepReport:
    report = SweepReport()
    for c in CHECKS:
        if only and c.number not in only:
            continue
        r = run_check(c)
        report.results.append(r)
        if on_result:
            on_result(r)
    return report


__all__ = ["CHECKS", "CheckResult", "SweepReport", "run_sweep", "truncate3"]
