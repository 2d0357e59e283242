"""Walkthrough: driving a tetrahedron-product triangulation to the staircase.

The three-phase driver first clears every tree owning a column joined to
rows {1,2} but not 4 (phase I), then every column joined to {1,2} but
missing one of {3,4} (phase II), and finally sorts the two surviving
column orders to the identity with square flips and a five-flip
transposition macro (phase III).  Every intermediate triangulation is
re-validated and every step the argument asserts is checked at runtime.
"""

import random
from collections import Counter

from prodtri import (
    apply_flip,
    apply_sequence,
    compute_TI,
    compute_TII,
    connect,
    enumerate_flips,
    restriction_order,
    staircase,
)

rng = random.Random(7)

# Scramble the staircase over four columns by a random walk of forty flips.
n = 4
T0 = staircase(n)
T = T0
for _ in range(40):
    T = apply_flip(T, rng.choice(enumerate_flips(T)))

print(f"start: {len(T.maximal)} trees,",
      f"strong defects {len(compute_TI(T))}, weak defects {len(compute_TII(T))}")
print("upper order:", restriction_order(T, 0, 1).as_total())
print("lower order:", restriction_order(T, 2, 3).as_total())

seq = connect(T)
counts = Counter(step.phase for step in seq.steps)
print(f"\nconnect found {len(seq)} flips: "
      f"I={counts['I']} II={counts['II']} III={counts['III']}")

for pos, step in enumerate(seq.steps):
    measures = dict(step.measures)
    print(f"  {pos:3d} [{step.phase:>3}] {step.circuit!r} "
          f"tI={measures['tI']} tII={measures['tII']}")

final = apply_sequence(T, seq)
print("\nendpoint equals the staircase:", final == T0)

# Any two triangulations connect by walking one sequence forward and the
# other backward.
T2 = T0
for _ in range(10):
    T2 = apply_flip(T2, rng.choice(enumerate_flips(T2)))
walk = connect(T) + connect(T2).reversed_()
print("pairwise connection works:", apply_sequence(T, walk) == T2)
