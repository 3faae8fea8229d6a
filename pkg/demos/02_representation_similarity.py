"""
Representation similarity with linear CKA
=========================================

Linear CKA compares two embedding matrices of the same sentences. It is 1
for identical representations and stays 1 under rotations, isotropic
scaling and translation, but not under general linear maps.
"""

import numpy as np
from scipy.stats import ortho_group

from xlgap import linear_cka, pairwise_cka
from xlgap.data import load_embeddings, mean_pool
from xlgap.gaps import heatmap_csv
from xlgap.report import bundled_toy_dir

rng = np.random.default_rng(0)

# sentence vectors come from mean-pooling token vectors
tokens = rng.normal(size=(7, 4))
print("pooled sentence vector:", np.round(mean_pool(tokens), 3))

x = rng.normal(size=(40, 6))
q = ortho_group.rvs(6, random_state=1)
print("\nCKA(X, X)             =", linear_cka(x, x))
print("CKA(X, 3 X Q + 5)     =", linear_cka(x, 3 * x @ q + 5))
print("CKA(X, X diag(10,1..))=", round(linear_cka(x, x @ np.diag([10, 1, 1, 1, 1, 0.1])), 4))
print("CKA(X, noise)         =", round(linear_cka(x, rng.normal(size=(40, 6))), 4))

# pairwise over the toy languages; the .bin file is the packed float32 format
toy = bundled_toy_dir()
sets = {e.language: e for e in map(load_embeddings, sorted(toy.glob("*.emb.*")))}
matrix = pairwise_cka(sets)
print(f"\nmean off-diagonal CKA: {matrix.mean_offdiag:.4f}")
print(heatmap_csv(matrix), end="")
