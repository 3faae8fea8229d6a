import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def all_permutations(n: int) -> np.ndarray:
    """Every permutation of range(n) in lexicographic order, as a read-only (n!, n) int8 array."""
    if n > 127:
        raise ValueError("int8 indices cap n at 127")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)
    perms.setflags(write=False)
    return perms
