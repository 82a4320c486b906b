"""Condensing digit multisets into numbers, and the digits of powers of five."""

from .arith import DEFAULT_CAPS, DEFAULT_RULES, RuleSet, SearchCaps, apply_binary, apply_factorial
from .bounds import (
    base6_digits, condense_zero, dp_delta_bounds, exceptional_triples, lemma_condense, log_bound,
)
from .cycles import (
    cycle_report, digit_oracle, digit_stream, first_exponent_with_run, leading_zeros_bound_check,
    max_zero_run, mod2_orbit, predicted_counts, zero_run_witnesses,
)
from .expr import Binary, DigitMultiset, Factorial, Leaf, evaluate, leaves, parse, render
from .pow5 import (
    digit_histogram, pow5_decimal, prove_selfcondensable, validate_selfcondensing,
    verify_thresholds,
)
from .search import contains, e_k_members, enumerate_witnesses, reduce_multiset, value_set

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CAPS", "DEFAULT_RULES", "RuleSet", "SearchCaps", "apply_binary", "apply_factorial",
    "base6_digits", "condense_zero", "dp_delta_bounds", "exceptional_triples", "lemma_condense",
    "log_bound", "cycle_report", "digit_oracle", "digit_stream", "first_exponent_with_run",
    "leading_zeros_bound_check", "max_zero_run", "mod2_orbit", "predicted_counts",
    "zero_run_witnesses", "Binary", "DigitMultiset", "Factorial", "Leaf", "evaluate", "leaves",
    "parse", "render", "digit_histogram", "pow5_decimal", "prove_selfcondensable",
    "validate_selfcondensing", "verify_thresholds", "contains", "e_k_members",
    "enumerate_witnesses", "reduce_multiset", "value_set",
]
