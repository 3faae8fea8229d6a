"""
Rank correlation between a gap measure and performance
======================================================

Spearman's rho and Kendall's tau-b with two-sided p-values. Up to ten
points the p-value enumerates every permutation; beyond that it falls back
to the t (Spearman) or normal (Kendall) approximation.
"""

import numpy as np

from xlgap import kendall_tau_b, spearman

rng = np.random.default_rng(2)

# e.g. similarity to English against downstream score, one point per language
similarity = rng.uniform(0.3, 0.9, size=9)
score = 60 + 30 * similarity + rng.normal(0, 4, size=9)

for fn in (spearman, kendall_tau_b):
    res = fn(similarity, score)
    print(f"{res.method:14s} {res.coefficient:+.3f}  p={res.p_value:.4f} ({res.p_method})")

# the two p-value routes agree closely at the switch-over size
x = rng.normal(size=10)
y = 0.6 * x + rng.normal(size=10)
for fn in (spearman, kendall_tau_b):
    exact = fn(x, y).p_value
    approx = fn(x, y, p_method="asymptotic").p_value
    print(f"n=10 {fn.__name__:14s} exact {exact:.4f}  asymptotic {approx:.4f}")

# ties get average ranks (Spearman) and the tau-b correction (Kendall)
print("\nwith ties:", spearman([1, 2, 2, 3, 4], [1, 1, 2, 3, 5]).coefficient)
