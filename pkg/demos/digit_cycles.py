"""Fixed positions in the digits of 5^n settle into cycles.

Run with ``python3 demos/digit_cycles.py``.
"""

from condense.cycles import cycle_report, digit_stream, mod2_orbit, zero_run_witnesses

for k in (2, 3, 4):
    s = digit_stream(k, 24)
    print(f"position {k}: {' '.join(str(d) for d in s.entries)}")

print("\nk  start  length  digit counts over one cycle")
for k in range(2, 11):
    r = cycle_report(k)
    print(f"{k:<2} {r.start_index:>5} {r.length:>7}  {list(r.counts)}")

orb = mod2_orbit(12)
print(f"\nCounts mod 2 repeat with period {orb.period} from k = {orb.period_start}.")

print("\nLong zero runs appear at n = m + 2^m + 2:")
for m, n, run, pos in zero_run_witnesses(12):
    print(f"  m = {m:2d}  n = {n:5d}  longest run {run} at position {pos}")
