"""Powers of five rebuild their own exponent from their digits.

Run with ``python3 demos/powers_of_five.py``.
"""

from condense.pow5 import digit_histogram, pow5_decimal, prove_selfcondensable, verify_thresholds

for n in (2, 3, 4, 8, 13, 40):
    w = prove_selfcondensable(n)
    print(f"n = {n:3d} [{w.method:>6}]  {w.identity}")

n = 300
w = prove_selfcondensable(n)
print(f"\n5^{n} has {len(pow5_decimal(n))} digits; witness built by {w.method!r}, "
      f"expression length {len(w.identity.split(' = ')[1])} characters")

rep = verify_thresholds()
print(f"\nThe digit supply outgrows the logarithmic demand from n = {rep.crossover} on.")
print(f"At n = 53: demand {float(rep.left[53][0]):.4f}, supply {float(rep.right[53][0]):.4f}")

hist = digit_histogram(1430)
print("\nDigit histogram of 5^1430 (1000 digits):")
for d, c in enumerate(hist):
    print(f"  {d}: {'#' * (c // 4)} {c}")
