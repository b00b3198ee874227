"""A source that switches personalities, and the rates that straddle it.

The block-switching source uses component 1 when ceil(log2 n) is even and
component 2 when it is odd, so the per-symbol statistics never settle. Tail
threshold rates along a doubling grid oscillate between the two component
entropies instead of converging.
"""

from overflowlab import (
    SwitchingSchedule,
    ceil_log2_parity,
    entropy,
    make_distribution,
    optimistic_study,
)

d1 = make_distribution([0.2, 0.8])
d2 = make_distribution([0.4, 0.6])
sched = SwitchingSchedule((d1, d2))

rep = optimistic_study(sched, 0.05, 0.05, [2 ** j for j in range(3, 13)])

print("switching between Bernoulli(0.2) and Bernoulli(0.4), eps = delta = 0.05")
print(f"component entropies: {entropy(d1):.4f} and {entropy(d2):.4f} bits")
print()
print(f"{'n':>6}  {'component':>9}  {'rate':>8}")
for smp in rep.samples:
    print(f"{smp.n:6d}  {smp.active_component:9d}  {smp.rate:8.5f}")
print()
print(f"limsup rate {rep.limsup_rate:.5f}  (optimistic coding theorem: "
      f"the larger entropy {max(entropy(d1), entropy(d2)):.5f})")
print(f"liminf rate {rep.liminf_rate:.5f}  (optimistic converse floor: "
      f"the smaller entropy {min(entropy(d1), entropy(d2)):.5f})")
print()
print("parity rule for the active component index at a few n:")
for n in (8, 12, 16, 100, 1024):
    print(f"  n = {n:5d}: ceil(log2 n) odd? {ceil_log2_parity(n)} "
          f"-> component {ceil_log2_parity(n)}")
