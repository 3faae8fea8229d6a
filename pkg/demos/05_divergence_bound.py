"""
Checking a domain-adaptation bound with decision stumps
=======================================================

For a hypothesis h, the difference of its risks on two domains is bounded
by half the HdH-divergence of the samples plus a complexity term. With
axis-aligned stumps every divergence can be computed exactly, so the
bound can be checked trial by trial.
"""

import numpy as np

from xlgap.divergence import (
    BoundParams,
    LabeledSample,
    StumpHypothesis,
    complexity_term,
    empirical_h_divergence,
    h_delta_h_divergence,
    stump_pdim,
    verify_bound,
)

rng = np.random.default_rng(3)


def mixture(n, means, weights):
    comp = rng.choice(len(means), size=n, p=weights)
    return (np.asarray(means)[comp] + rng.normal(size=n))[:, None]


def labels(x):
    clean = (x[:, 0] <= 0.3).astype(int)
    return np.where(rng.random(len(x)) < 0.1, 1 - clean, clean)


xa = mixture(50, [-1.0, 1.0], [0.5, 0.5])
xb = mixture(50, [-0.5, 2.0], [0.3, 0.7])
print(f"H-divergence   {empirical_h_divergence(xa, xb):.3f}")
print(f"HdH-divergence {h_delta_h_divergence(xa, xb):.3f}")

# the complexity term dominates at small n
for n in (50, 500, 5000):
    print(f"complexity(pdim=2, n={n}, delta=0.05) = {complexity_term(BoundParams(2, n, 0.05)):.3f}")

h = StumpHypothesis(dim=0, threshold=0.3)
res = verify_bound(LabeledSample(xa, labels(xa)), LabeledSample(xb, labels(xb)), h, pdim=stump_pdim(1))
print("\n", res.to_json())

holds = 0
for _ in range(100):
    xa = mixture(50, [-1.0, 1.0], [0.5, 0.5])
    xb = mixture(50, [-0.5, 2.0], [0.3, 0.7])
    holds += verify_bound(LabeledSample(xa, labels(xa)), LabeledSample(xb, labels(xb)), h).holds
print(f"bound held in {holds}/100 redraws")
