"""Entropic optimal transport between two sets of probability rows.

The solver runs Sinkhorn iterations on dual potentials in the log domain,
so very small regularization weights do not underflow the Gibbs kernel.
Two accelerations keep small-epsilon problems tractable:

* epsilon annealing: potentials are warm-started from a sequence of larger
  regularization weights, halving down to the target;
* Newton polishing: once plain iterations stall (near-permutation plans
  leave almost-flat dual directions), full Newton steps on the dual are
  tried. A step is kept only if it lowers the marginal violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._enum import all_permutations
from .data import ProbabilitySet
from .errors import ConfigError, DomainError, UnsupportedSizeError

EXACT_OT_MAX_N = 8
_STAGE_TOL = 1e-6
_BLOCK = 100
_STAGE_CAP = 500
_CHECK_EVERY = 10


@dataclass(frozen=True)
class SinkhornConfig:
    epsilon: float = 0.05
    max_iters: int = 10000
    tolerance: float = 1e-9
    anneal: bool = True
    newton: bool = True
    newton_max_size: int = 400  # n + m above which Newton polishing is skipped

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ConfigError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")


@dataclass(frozen=True)
class TransportPlan:
    plan: np.ndarray
    cost: float
    iterations: int
    converged: bool
    epsilon: float
    violation: float
    # marginal violation at the target epsilon, sampled every 100 iterations
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def distance(self) -> float:
        return self.cost


def _rows(p) -> np.ndarray:
    if isinstance(p, ProbabilitySet):
        return p.rows
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DomainError(f"expected a non-empty (n, k) probability matrix, got shape {arr.shape}")
    return arr


def cost_matrix(p, q) -> np.ndarray:
    """Squared Euclidean distance between every row of ``p`` and every row of ``q``."""
    a, b = _rows(p), _rows(q)
    if a.shape[1] != b.shape[1]:
        raise DomainError(f"class counts differ: {a.shape[1]} vs {b.shape[1]}")
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _lse(x: np.ndarray, axis: int) -> np.ndarray:
    m = x.max(axis=axis, keepdims=True)
    return (m + np.log(np.exp(x - m).sum(axis=axis, keepdims=True))).squeeze(axis)


class _Dual:
    """Log-domain Sinkhorn state for one cost matrix and uniform marginals."""

    def __init__(self, C: np.ndarray):
        self.C = C
        n, m = C.shape
        self.a = np.full(n, 1.0 / n)
        self.b = np.full(m, 1.0 / m)
        self.log_a = np.log(self.a)
        self.log_b = np.log(self.b)
        self.f = np.zeros(n)
        self.g = np.zeros(m)

    def sweep(self, eps, f=None, g=None):
        f = self.f if f is None else f
        g = self.g if g is None else g
        f = eps * (self.log_a - _lse((g[None, :] - self.C) / eps, 1))
        g = eps * (self.log_b - _lse((f[:, None] - self.C) / eps, 0))
        return f, g

    def plan(self, eps, f=None, g=None):
        f = self.f if f is None else f
        g = self.g if g is None else g
        return np.exp((f[:, None] + g[None, :] - self.C) / eps)

    def violation(self, eps, f=None, g=None) -> float:
        P = self.plan(eps, f, g)
        return max(np.abs(P.sum(axis=1) - self.a).max(), np.abs(P.sum(axis=0) - self.b).max())

    def newton_direction(self, eps):
        P = self.plan(eps)
        r, c = P.sum(axis=1), P.sum(axis=0)
        hess = np.block([[np.diag(r), P], [P.T, np.diag(c)]]) / eps
        grad = np.concatenate([self.a - r, self.b - c])
        # the dual is invariant to (f + t, g - t); lstsq picks the min-norm step
        step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        n = len(self.f)
        return step[:n], step[n:]


def sinkhorn(p, q, cfg: SinkhornConfig | None = None) -> TransportPlan:
    """Entropic OT between the uniform empirical distributions on the rows of ``p`` and ``q``.

    The reported cost is ``<plan, C>``; the entropy term is excluded.
    Failure to reach ``cfg.tolerance`` within ``cfg.max_iters`` is reported
    through ``converged=False``, not raised.
    """
    cfg = cfg or SinkhornConfig()
    C = cost_matrix(p, q)
    eps, tol = cfg.epsilon, cfg.tolerance
    state = _Dual(C)
    iters = 0

    # warm start from a halving schedule of larger epsilons; warm-up stages
    # are capped and may use at most half the budget
    stage_eps = max(float(C.max()), eps) if cfg.anneal else eps
    warmup_budget = cfg.max_iters // 2
    while stage_eps > eps and iters < warmup_budget:
        stage_tol = max(tol, _STAGE_TOL)
        for k in range(1, min(_STAGE_CAP, warmup_budget - iters) + 1):
            state.f, state.g = state.sweep(stage_eps)
            iters += 1
            if k % _CHECK_EVERY == 0 and state.violation(stage_eps) <= stage_tol:
                break
        stage_eps = max(stage_eps / 2, eps)

    use_newton = cfg.newton and sum(C.shape) <= cfg.newton_max_size
    violation = state.violation(eps)
    history = [violation]
    while violation > tol and iters < cfg.max_iters:
        start = violation
        for k in range(1, _BLOCK + 1):
            state.f, state.g = state.sweep(eps)
            iters += 1
            if k % _CHECK_EVERY == 0 or iters >= cfg.max_iters:
                violation = state.violation(eps)
                if violation <= tol or iters >= cfg.max_iters:
                    break
        if use_newton and violation > tol and violation > 0.1 * start:
            violation, iters = _polish(state, eps, tol, violation, iters, cfg.max_iters)
        history.append(violation)

    plan = state.plan(eps)
    return TransportPlan(
        plan=plan,
        cost=float(np.sum(plan * C)),
        iterations=iters,
        converged=bool(violation <= tol),
        epsilon=eps,
        violation=float(violation),
        history=tuple(history),
    )


def _polish(state: _Dual, eps, tol, violation, iters, max_iters):
    for _ in range(10):
        if violation <= tol or iters >= max_iters:
            break
        df, dg = state.newton_direction(eps)
        t = 1.0
        while t > 1e-4:
            f, g = state.sweep(eps, state.f + t * df, state.g + t * dg)
            trial = state.violation(eps, f, g)
            if trial < violation:
                break
            t /= 2
        else:
            break
        state.f, state.g, violation = f, g, trial
        iters += 1
    return violation, iters


def sinkhorn_distance(p, q, cfg: SinkhornConfig | None = None) -> float:
    return sinkhorn(p, q, cfg).cost


def exact_ot(p, q) -> float:
    """Exact OT cost for equal-size uniform sets by exhaustive assignment search.

    With uniform marginals on n = m points an optimal plan is a permutation
    matrix scaled by 1/n, so the minimum over all n! assignments is exact.
    """
    C = cost_matrix(p, q)
    n, m = C.shape
    if n != m or n > EXACT_OT_MAX_N:
        raise UnsupportedSizeError(f"exact_ot needs n == m <= {EXACT_OT_MAX_N}, got {n}x{m}")
    perms = all_permutations(n)
    costs = C[np.arange(n), perms].mean(axis=1)
    return float(costs.min())
