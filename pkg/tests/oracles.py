"""Independent brute-force oracles.

Each function recomputes a quantity by the most literal route available
(explicit loops, full enumeration) and shares no code with the library.
"""

import itertools
import math
from fractions import Fraction


def mean_loop(tokens):
    d = len(tokens[0])
    out = [0.0] * d
    for tok in tokens:
        for k in range(d):
            out[k] += tok[k]
    return [v / len(tokens) for v in out]


def _center_cols(X):
    n, d = len(X), len(X[0])
    means = [sum(X[i][k] for i in range(n)) / n for k in range(d)]
    return [[X[i][k] - means[k] for k in range(d)] for i in range(n)]


def _gram(X):
    n, d = len(X), len(X[0])
    return [[sum(X[i][k] * X[j][k] for k in range(d)) for j in range(n)] for i in range(n)]


def cka_loops(X, Y):
    """Linear CKA as tr(K L) / sqrt(tr(K K) tr(L L)) with centered Gram matrices, all loops."""
    K, L = _gram(_center_cols(X)), _gram(_center_cols(Y))
    n = len(K)

    def tr(A, B):
        return sum(A[i][j] * B[j][i] for i in range(n) for j in range(n))

    return tr(K, L) / math.sqrt(tr(K, K) * tr(L, L))


def cost_loops(P, Q):
    return [[sum((p - q) ** 2 for p, q in zip(P[i], Q[j])) for j in range(len(Q))] for i in range(len(P))]


def assignment_min(C):
    n = len(C)
    return min(sum(C[i][perm[i]] for i in range(n)) / n for perm in itertools.permutations(range(n)))


def _ranks(v):
    out = []
    for a in v:
        less = sum(1 for b in v if b < a)
        equal = sum(1 for b in v if b == a)
        out.append(less + (equal + 1) / 2)
    return out


def spearman_hand(x, y):
    rx, ry = _ranks(x), _ranks(y)
    n = len(x)
    mx, my = sum(rx) / n, sum(ry) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    return sxy / math.sqrt(sxx * syy)


def kendall_hand(x, y):
    n = len(x)
    conc = disc = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = x[i] - x[j], y[i] - y[j]
            if dx == 0:
                tx += 1
            if dy == 0:
                ty += 1
            if dx * dy > 0:
                conc += 1
            elif dx * dy < 0:
                disc += 1
    n0 = n * (n - 1) // 2
    return (conc - disc) / math.sqrt((n0 - tx) * (n0 - ty))


def perm_pvalue(stat, x, y):
    observed = abs(stat(x, y))
    hits = total = 0
    for perm in itertools.permutations(range(len(y))):
        total += 1
        if abs(stat(x, [y[k] for k in perm])) >= observed - 1e-12:
            hits += 1
    return hits / total


def thresholds_1d(values):
    u = sorted(set(values))
    return [-math.inf] + [(a + b) / 2 for a, b in zip(u, u[1:])] + [math.inf]


def h_div_brute(A, B):
    """A, B: lists of d-tuples. Every stump, both polarities, counted in exact rationals."""
    best = Fraction(0)
    for k in range(len(A[0])):
        for t in thresholds_1d([p[k] for p in A] + [p[k] for p in B]):
            for le_is_one in (True, False):
                ha = sum(1 for p in A if (p[k] <= t) == le_is_one)
                hb = sum(1 for p in B if (p[k] <= t) == le_is_one)
                best = max(best, abs(Fraction(ha, len(A)) - Fraction(hb, len(B))))
    return 2.0 * float(best)


def hdh_brute(A, B):
    """Every ordered pair of stumps (dimension, threshold, polarity), disagreement counted point by point."""
    d = len(A[0])
    stumps = []
    for k in range(d):
        for t in thresholds_1d([p[k] for p in A] + [p[k] for p in B]):
            for le_is_one in (True, False):
                stumps.append((k, t, le_is_one))

    def h(s, p):
        k, t, le = s
        return (p[k] <= t) == le

    best = Fraction(0)
    for s1 in stumps:
        for s2 in stumps:
            da = sum(1 for p in A if h(s1, p) != h(s2, p))
            db = sum(1 for p in B if h(s1, p) != h(s2, p))
            best = max(best, abs(Fraction(da, len(A)) - Fraction(db, len(B))))
    return 2.0 * float(best)
