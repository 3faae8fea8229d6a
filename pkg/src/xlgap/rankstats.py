"""Spearman and Kendall tau-b correlation with exact or asymptotic two-sided p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._enum import all_permutations
from .errors import DegenerateInputError, DomainError, UnsupportedSizeError

TIE_EPS = 1e-12
EXACT_MAX_N = 10
_CHUNK = 1 << 16


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    p_value: float
    method: str  # "spearman" | "kendall_tau_b"
    p_method: str  # "exact_permutation" | "asymptotic"
    n: int

    def to_json(self) -> dict:
        return {
            "coefficient": self.coefficient,
            "p_value": self.p_value,
            "method": self.method,
            "p_method": self.p_method,
            "n": self.n,
        }


def _check(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise DomainError("need at least 3 observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("inputs must be finite")
    return x, y


def average_ranks(values) -> np.ndarray:
    """1-based ranks; values within TIE_EPS of their sorted neighbour share the average rank."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    ranks = np.empty(v.size)
    start = 0
    for i in range(1, v.size + 1):
        if i == v.size or sv[i] - sv[i - 1] > TIE_EPS:
            ranks[order[start:i]] = 0.5 * (start + i - 1) + 1.0
            start = i
    return ranks


def _tie_groups(values) -> np.ndarray:
    ranks = average_ranks(values)
    _, counts = np.unique(ranks, return_counts=True)
    return counts


def _sign(diff: np.ndarray) -> np.ndarray:
    return np.where(diff > TIE_EPS, 1, np.where(diff < -TIE_EPS, -1, 0)).astype(np.int64)


# --------------------------------------------------------------- statistics


def _spearman_stat(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """Pearson correlation of rank vectors; ``ry`` may carry a leading batch axis."""
    xc = rx - rx.mean()
    yc = ry - ry.mean(axis=-1, keepdims=True)
    denom = math.sqrt(float(xc @ xc)) * np.sqrt((yc * yc).sum(axis=-1))
    return (yc @ xc) / denom


def _kendall_parts(x, y):
    n = x.size
    iu, ju = np.triu_indices(n, 1)
    sx = _sign(x[ju] - x[iu])
    n0 = n * (n - 1) // 2
    n1 = sum(int(t) * (int(t) - 1) // 2 for t in _tie_groups(x))
    n2 = sum(int(t) * (int(t) - 1) // 2 for t in _tie_groups(y))
    return iu, ju, sx, n0, n1, n2


def _kendall_S(y_batch: np.ndarray, iu, ju, sx) -> np.ndarray:
    """Concordant minus discordant pair count, for each row of ``y_batch``."""
    return _sign(y_batch[..., ju] - y_batch[..., iu]) @ sx


def spearman_coefficient(x, y) -> float:
    x, y = _check(x, y)
    rx, ry = average_ranks(x), average_ranks(y)
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        raise DegenerateInputError("constant input has no rank variance")
    return float(np.clip(_spearman_stat(rx, ry), -1.0, 1.0))


def kendall_coefficient(x, y) -> float:
    x, y = _check(x, y)
    iu, ju, sx, n0, n1, n2 = _kendall_parts(x, y)
    if n0 == n1 or n0 == n2:
        raise DegenerateInputError("constant input has no rank variance")
    S = int(_kendall_S(y, iu, ju, sx))
    return S / math.sqrt((n0 - n1) * (n0 - n2))


# ------------------------------------------------------------------ p-values


def exact_perm_pvalue(statistic: str, x, y, chunk: int = _CHUNK) -> float:
    """Two-sided permutation p-value over all n! reorderings of ``y``.

    Counts permutations whose |statistic| reaches the observed one and
    divides by n!. Both statistics have a denominator that no reordering of
    ``y`` changes, so the comparison runs on integer numerators: the rank
    cross-product (ranks doubled to clear the .5 of ties) for Spearman and
    S = concordant - discordant for Kendall. The count is therefore exact,
    and ``chunk`` only trades memory for speed.
    """
    x, y = _check(x, y)
    n = x.size
    if n > EXACT_MAX_N:
        raise UnsupportedSizeError(f"exact permutation test supports n <= {EXACT_MAX_N}, got {n}")
    perms = all_permutations(n)
    if statistic == "spearman":
        spearman_coefficient(x, y)  # degenerate-input check
        cx = np.rint(2 * average_ranks(x)).astype(np.int64) - (n + 1)
        cy = np.rint(2 * average_ranks(y)).astype(np.int64) - (n + 1)
        observed = abs(int(cy @ cx))

        def batch_num(idx):
            return cy[idx] @ cx

    elif statistic in ("kendall", "kendall_tau_b"):
        kendall_coefficient(x, y)
        iu, ju, sx, *_ = _kendall_parts(x, y)
        observed = abs(int(_kendall_S(y, iu, ju, sx)))
        # sy[a * n + b] = sign(y[b] - y[a]); sums of at most 45 terms of
        # -1/0/1 are exact in float32 whatever order BLAS adds them in
        sy = _sign(y[None, :] - y[:, None]).astype(np.float32).ravel()
        sx32 = sx.astype(np.float32)

        def batch_num(idx):
            code = idx[:, iu].astype(np.intp) * n + idx[:, ju]
            return np.rint(sy[code] @ sx32).astype(np.int64)

    else:
        raise ValueError(f"unknown statistic {statistic!r}")

    hits = 0
    for start in range(0, len(perms), chunk):
        hits += int(np.count_nonzero(np.abs(batch_num(perms[start : start + chunk])) >= observed))
    return hits / len(perms)


def _spearman_asymptotic(rho: float, n: int) -> float:
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * stats.t.sf(abs(t), n - 2))


def _kendall_asymptotic(x, y) -> float:
    # normal approximation of S with the tie-corrected variance and a
    # continuity correction of 1
    n = x.size
    iu, ju, sx, *_ = _kendall_parts(x, y)
    S = int(_kendall_S(y, iu, ju, sx))
    tx = _tie_groups(x).astype(np.float64)
    ty = _tie_groups(y).astype(np.float64)
    v0 = n * (n - 1) * (2 * n + 5)
    vt = float(np.sum(tx * (tx - 1) * (2 * tx + 5)))
    vu = float(np.sum(ty * (ty - 1) * (2 * ty + 5)))
    v1 = float(np.sum(tx * (tx - 1))) * float(np.sum(ty * (ty - 1))) / (2.0 * n * (n - 1))
    v2 = float(np.sum(tx * (tx - 1) * (tx - 2))) * float(np.sum(ty * (ty - 1) * (ty - 2))) / (
        9.0 * n * (n - 1) * (n - 2)
    )
    var = (v0 - vt - vu) / 18.0 + v1 + v2
    z = max(abs(S) - 1, 0) / math.sqrt(var)
    return float(min(1.0, 2.0 * stats.norm.sf(z)))


def _p_method(n: int, p_method: str | None) -> str:
    if p_method is None:
        return "exact_permutation" if n <= EXACT_MAX_N else "asymptotic"
    if p_method not in ("exact_permutation", "asymptotic"):
        raise ValueError(f"unknown p_method {p_method!r}")
    if p_method == "exact_permutation" and n > EXACT_MAX_N:
        raise UnsupportedSizeError(f"exact permutation test supports n <= {EXACT_MAX_N}, got {n}")
    return p_method


def spearman(x, y, p_method: str | None = None) -> CorrelationResult:
    """Spearman's rho on average ranks with a two-sided p-value.

    The p-value is exact (full permutation enumeration) for n <= 10 and
    uses the t distribution with n - 2 degrees of freedom otherwise, unless
    ``p_method`` forces one of the two.
    """
    x, y = _check(x, y)
    rho = spearman_coefficient(x, y)
    method = _p_method(x.size, p_method)
    if method == "exact_permutation":
        p = exact_perm_pvalue("spearman", x, y)
    else:
        p = _spearman_asymptotic(rho, x.size)
    return CorrelationResult(rho, p, "spearman", method, int(x.size))


def kendall_tau_b(x, y, p_method: str | None = None) -> CorrelationResult:
    """Kendall's tau-b (tie corrected) with a two-sided p-value."""
    x, y = _check(x, y)
    tau = kendall_coefficient(x, y)
    method = _p_method(x.size, p_method)
    if method == "exact_permutation":
        p = exact_perm_pvalue("kendall", x, y)
    else:
        p = _kendall_asymptotic(x, y)
    return CorrelationResult(tau, p, "kendall_tau_b", method, int(x.size))
