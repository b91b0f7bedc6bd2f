"""Why 5/12 is the ceiling for vertex arrival.

Steeply separated weights reduce the weighted problem to a rank-only one:
maximize the probability of matching the global top two vertices, using
only relative ranks, with a per-step match probability c_i.  The
objective is affine in every c_i, its partial derivatives flip sign once,
so the best policy is a threshold: explore, then always match.  Sweeping
the cutoff caps the objective at 5/12 + O(1/n).
"""

import numpy as np

from secmatch import OrdinalPolicy, gradient, objective, optimal_threshold, simulate_ordinal, threshold_policy
from secmatch.ordinal import ceiling_bound, exhaustive_policy_search, hard_instance_matching

rng = np.random.default_rng(0)
pol = OrdinalPolicy.from_list(rng.random(12).tolist())
print(f"random policy objective: {objective(pol):.4f}")
g = gradient(pol)
print("gradient signs by step:", ["+" if x > 0 else "-" for x in g[2:]])

best, _winners, has_threshold = exhaustive_policy_search(7)
print(f"\nexhaustive 0/1 search at n=7: best {float(best):.4f}, "
      f"threshold attains it: {has_threshold}")

for n in (100, 1000, 10000):
    r = optimal_threshold(n)
    print(f"n={n:6d}: best cutoff {r.l_star} (~n/2), value {r.value:.6f}")
print(f"continuum bound: 2*g(1/2) = {2 * ceiling_bound(0.5):.6f} = 5/12")

pol = threshold_policy(2000, 1000)
est = simulate_ordinal(pol, 100000, seed=4)
print(f"\nsimulated n=2000 threshold policy: {est.estimate:.4f} ± {est.stderr:.4f}")

print("\nsteep-weight instances pair by descending label:")
print("  labels {7, 2, 9, 4} ->", hard_instance_matching([7, 2, 9, 4]))
