"""Empirical H-divergence over axis-aligned decision stumps and the risk-gap bound.

Stumps only change behaviour between consecutive distinct sample values, so
sweeping the midpoints of the pooled sorted coordinates (plus the two
infinite sentinels, which give the constant hypotheses) enumerates every
distinct stump on a finite sample. That makes the supremum in the
divergence an exact maximum.

Differences of empirical probabilities are formed as one exact integer
ratio, ``|c_A n_B - c_B n_A| / (n_A n_B)``, rounded once. The result is the
correctly rounded value of the exact rational, so any exact enumeration
reproduces it bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedSizeError

PAIR_BUDGET = 10**6


def _points(x) -> np.ndarray:
    pts = getattr(x, "points", x)
    arr = np.asarray(pts, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DomainError(f"expected a non-empty (n, d) sample, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sample contains non-finite values")
    return arr


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray

    def __post_init__(self):
        p = _points(self.points).copy()
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class LabeledSample:
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        p = _points(self.points).copy()
        lab = np.asarray(self.labels)
        if lab.shape != (p.shape[0],):
            raise DomainError(f"need one label per point: {lab.shape} vs {p.shape[0]} points")
        if not np.all((lab == 0) | (lab == 1)):
            raise DomainError("labels must be 0 or 1")
        lab = lab.astype(np.int64)
        p.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class StumpHypothesis:
    """``h(x) = 1`` iff ``x[dim] <= threshold`` (or ``>`` when ``le_is_one`` is False)."""

    dim: int
    threshold: float
    le_is_one: bool = True

    def __call__(self, points) -> np.ndarray:
        pts = _points(points)
        if not 0 <= self.dim < pts.shape[1]:
            raise DomainError(f"stump dim {self.dim} out of range for d={pts.shape[1]}")
        below = pts[:, self.dim] <= self.threshold
        return (below if self.le_is_one else ~below).astype(np.int64)


@dataclass(frozen=True)
class BoundParams:
    pdim: int
    n: int
    delta: float

    def __post_init__(self):
        if int(self.pdim) != self.pdim or self.pdim < 1:
            raise DomainError(f"pdim must be a positive integer, got {self.pdim}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"sample size must be a positive integer, got {self.n}")
        if not 0 < self.delta < 1:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class BoundCheck:
    gap: float
    bound: float
    holds: bool
    h_div: float
    hdh_div: float
    complexity: float

    def to_json(self) -> dict:
        return {
            "h_div": self.h_div,
            "hdh_div": self.hdh_div,
            "complexity": self.complexity,
            "bound": self.bound,
            "gap": self.gap,
            "holds": self.holds,
        }


def candidate_thresholds(values) -> np.ndarray:
    """Midpoints between consecutive distinct values, framed by -inf and +inf."""
    u = np.unique(np.asarray(values, dtype=np.float64))
    mids = (u[:-1] + u[1:]) / 2.0
    return np.concatenate([[-np.inf], mids, [np.inf]])


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    pa, pb = _points(a), _points(b)
    if pa.shape[1] != pb.shape[1]:
        raise DomainError(f"dimension mismatch: {pa.shape[1]} vs {pb.shape[1]}")
    return pa, pb


def _max_abs_diff(ca, cb, na: int, nb: int) -> float:
    # counts stay far below 2**53, so the numerator is exact in int64
    num = np.abs(np.asarray(ca, dtype=np.int64) * nb - np.asarray(cb, dtype=np.int64) * na)
    return float(num.max()) / (na * nb)


def empirical_h_divergence(a, b) -> float:
    """``2 * max_h |P_A(h = 1) - P_B(h = 1)|`` over all stumps, exactly."""
    pa, pb = _pair(a, b)
    na, nb = pa.shape[0], pb.shape[0]
    best = 0.0
    for dim in range(pa.shape[1]):
        t = candidate_thresholds(np.concatenate([pa[:, dim], pb[:, dim]]))
        # counts of points at or below each threshold; flipping polarity
        # negates the difference, so |.| covers both
        ca = np.searchsorted(np.sort(pa[:, dim]), t, side="right")
        cb = np.searchsorted(np.sort(pb[:, dim]), t, side="right")
        best = max(best, _max_abs_diff(ca, cb, na, nb))
    return 2.0 * best


def stump_pair_count(a, b) -> int:
    """Number of threshold pairs :func:`h_delta_h_divergence` would evaluate."""
    pa, pb = _pair(a, b)
    sizes = [
        len(candidate_thresholds(np.concatenate([pa[:, k], pb[:, k]]))) for k in range(pa.shape[1])
    ]
    return sum(sizes[i] * sizes[j] for i, j in itertools.combinations_with_replacement(range(len(sizes)), 2))


def h_delta_h_divergence(a, b, budget: int = PAIR_BUDGET) -> float:
    """``2 * max |P_A(h != h') - P_B(h != h')|`` over all pairs of stumps.

    For each pair of coordinates the disagreement counts of every threshold
    pair come from one indicator cross product:
    ``#(h xor h') = #h + #h' - 2 #(h and h')``. Polarity flips complement the
    xor region, which leaves the absolute difference unchanged.
    """
    pa, pb = _pair(a, b)
    pairs = stump_pair_count(pa, pb)
    if pairs > budget:
        raise UnsupportedSizeError(f"{pairs} stump pairs exceed the budget of {budget}")
    na, nb = pa.shape[0], pb.shape[0]
    d = pa.shape[1]
    thresholds = [candidate_thresholds(np.concatenate([pa[:, k], pb[:, k]])) for k in range(d)]
    ind_a = [(pa[:, k][:, None] <= thresholds[k][None, :]).astype(np.float64) for k in range(d)]
    ind_b = [(pb[:, k][:, None] <= thresholds[k][None, :]).astype(np.float64) for k in range(d)]

    def xor_counts(ind, i, j):
        # float64 holds these integer counts exactly
        both = ind[i].T @ ind[j]
        xor = ind[i].sum(axis=0)[:, None] + ind[j].sum(axis=0)[None, :] - 2.0 * both
        return xor.astype(np.int64)

    best = 0.0
    for i, j in itertools.combinations_with_replacement(range(d), 2):
        best = max(best, _max_abs_diff(xor_counts(ind_a, i, j), xor_counts(ind_b, i, j), na, nb))
    return 2.0 * best


def complexity_term(params: BoundParams) -> float:
    """``2 sqrt((d ln(2n) + ln(2/delta)) / n)`` with natural logarithms."""
    d, n, delta = params.pdim, params.n, params.delta
    return 2.0 * math.sqrt((d * math.log(2 * n) + math.log(2.0 / delta)) / n)


def stump_pdim(d: int) -> int:
    """Upper bound on the VC dimension of d-dimensional stumps (both polarities).

    Stumps realise at most ``2 + 2d(N - 1)`` labelings of N points, so no set
    larger than the largest N with ``2**N <= 2 + 2d(N - 1)`` is shattered.
    Exact (= 2) for d = 1.
    """
    if d < 1:
        raise DomainError("d must be positive")
    N = 1
    while 2 ** (N + 1) <= 2 + 2 * d * N:
        N += 1
    return N


def empirical_risk(h: StumpHypothesis, sample: LabeledSample) -> float:
    """Mean ``|f(x) - h(x)|`` over the sample, f being the stored labels."""
    if sample.n == 0:
        raise DomainError("empirical risk of an empty sample")
    return float(np.count_nonzero(h(sample.points) != sample.labels) / sample.n)


def verify_bound(a: LabeledSample, b: LabeledSample, h: StumpHypothesis, params: BoundParams | None = None,
                 *, delta: float = 0.05, pdim: int | None = None, budget: int = PAIR_BUDGET) -> BoundCheck:
    """Check ``|risk_A(h) - risk_B(h)| <= d_HdH / 2 + complexity`` on two labeled samples.

    Without ``params`` the sample size is ``min(|A|, |B|)`` and ``pdim``
    defaults to :func:`stump_pdim` of the input dimension.
    """
    pa, pb = _pair(a.points, b.points)
    n = min(a.n, b.n)
    if params is None:
        params = BoundParams(pdim or stump_pdim(pa.shape[1]), n, delta)
    elif params.n != n:
        raise DomainError(f"params.n={params.n} but min sample size is {n}")
    gap = abs(empirical_risk(h, a) - empirical_risk(h, b))
    hdh = h_delta_h_divergence(pa, pb, budget=budget)
    comp = complexity_term(params)
    bound = 0.5 * hdh + comp
    return BoundCheck(
        gap=gap,
        bound=bound,
        holds=bool(gap <= bound),
        h_div=empirical_h_divergence(pa, pb),
        hdh_div=hdh,
        complexity=comp,
    )
