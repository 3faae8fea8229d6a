"""Performance gaps (relative percentage difference) and linguistic gaps (linear CKA)."""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .data import EmbeddingSet, ScoreTable, atomic_write_text, check_language
from .errors import AlignmentError, DegenerateInputError, DomainError


@dataclass(frozen=True)
class PairwiseMatrix:
    """Symmetric language-by-language matrix with a fixed diagonal."""

    languages: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        langs = tuple(check_language(c) for c in self.languages)
        v = np.array(self.values, dtype=np.float64)
        if v.shape != (len(langs), len(langs)):
            raise DomainError(f"values must be {len(langs)}x{len(langs)}, got {v.shape}")
        if not np.allclose(v, v.T, rtol=0, atol=1e-12):
            raise DomainError("pairwise matrix is not symmetric")
        v.setflags(write=False)
        object.__setattr__(self, "languages", langs)
        object.__setattr__(self, "values", v)

    def pairs(self):
        """Yield ``(lang_i, lang_j, value)`` for each unordered pair, upper triangle, input order."""
        for i, j in itertools.combinations(range(len(self.languages)), 2):
            yield self.languages[i], self.languages[j], float(self.values[i, j])

    @property
    def mean_offdiag(self) -> float:
        vals = [v for _, _, v in self.pairs()]
        if not vals:
            raise DomainError("need at least two languages for an off-diagonal mean")
        return float(np.mean(vals))

    def __getitem__(self, key):
        a, b = key
        return float(self.values[self.languages.index(a), self.languages.index(b)])


# ----------------------------------------------------------------------- RPD


def rpd(s_i: float, s_j: float) -> float:
    """Relative percentage difference: |s_i - s_j| over the pair mean, times 100."""
    s_i, s_j = float(s_i), float(s_j)
    if s_i < 0 or s_j < 0:
        raise DomainError(f"scores must be non-negative, got {s_i}, {s_j}")
    total = s_i + s_j
    if total == 0:
        raise DomainError("relative difference is undefined when both scores are zero")
    return abs(s_i - s_j) / (0.5 * total) * 100.0


def _scores(table) -> tuple[list[str], np.ndarray]:
    if isinstance(table, ScoreTable):
        return table.languages, np.array(list(table.entries.values()), dtype=np.float64)
    if isinstance(table, Mapping):
        return list(table), np.array(list(table.values()), dtype=np.float64)
    arr = np.asarray(table, dtype=np.float64)
    return [f"l{i}" for i in range(arr.size)], arr


def score_spread(table) -> tuple[float, float]:
    """Return ``(std, mean_rpd)`` for a table of percentage scores.

    ``std`` is the sample standard deviation (n - 1 denominator) of the scores
    on the fraction scale (score / 100). ``mean_rpd`` averages :func:`rpd` over
    all unordered language pairs. Accepts a ScoreTable, a mapping, or a plain
    sequence of scores.
    """
    _, scores = _scores(table)
    if scores.size < 2:
        raise DomainError("score spread needs at least two languages")
    std = float(np.std(scores / 100.0, ddof=1))
    gaps = [rpd(a, b) for a, b in itertools.combinations(scores, 2)]
    return std, float(np.mean(gaps))


def rpd_matrix(table) -> PairwiseMatrix:
    langs, scores = _scores(table)
    n = len(langs)
    values = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        values[i, j] = values[j, i] = rpd(scores[i], scores[j])
    return PairwiseMatrix(tuple(langs), values)


# ----------------------------------------------------------------------- CKA


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, EmbeddingSet):
        return x.matrix
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DomainError(f"expected a 2-D feature matrix, got shape {arr.shape}")
    return arr


def _prepare(x, centered: bool) -> np.ndarray:
    if not centered:
        return x
    xc = x - x.mean(axis=0, keepdims=True)
    # residue left by centering a constant column is rounding noise, not signal
    scale = max(1.0, float(np.abs(x).max(initial=0.0)))
    if float(np.abs(xc).max(initial=0.0)) <= 1e-12 * scale:
        return np.zeros_like(xc)
    return xc


def linear_cka(x, y, centered: bool = True) -> float:
    """Linear centered kernel alignment between two row-aligned feature matrices.

    ``||X^T Y||_F^2 / (||X^T X||_F ||Y^T Y||_F)`` after column-centering both
    inputs. ``centered=False`` skips the centering step.
    """
    x, y = _as_matrix(x), _as_matrix(y)
    if x.shape[0] != y.shape[0]:
        raise AlignmentError(f"row counts differ: {x.shape[0]} vs {y.shape[0]}")
    xc, yc = _prepare(x, centered), _prepare(y, centered)
    norm_x = np.linalg.norm(xc.T @ xc)
    norm_y = np.linalg.norm(yc.T @ yc)
    if norm_x == 0.0 or norm_y == 0.0:
        raise DegenerateInputError("feature matrix has zero variance")
    cross = np.linalg.norm(xc.T @ yc) ** 2
    return float(min(cross / (norm_x * norm_y), 1.0))


def pairwise_cka(sets, centered: bool = True, workers: int | None = None) -> PairwiseMatrix:
    """CKA for every unordered pair of languages.

    ``sets`` maps language code to EmbeddingSet (or raw matrix); a sequence of
    EmbeddingSets is also accepted. Pairs may be evaluated on ``workers``
    threads; each pair is computed independently so the result does not
    depend on scheduling.
    """
    if not isinstance(sets, Mapping):
        sets = {e.language: e for e in sets}
    langs = tuple(sets)
    mats = [_as_matrix(sets[lang]) for lang in langs]
    counts = Counter(m.shape[0] for m in mats)
    if len(counts) > 1:
        ref = counts.most_common(1)[0][0]
        odd, rows = next((lang, m.shape[0]) for lang, m in zip(langs, mats) if m.shape[0] != ref)
        raise AlignmentError(f"language {odd!r} has {rows} rows, expected {ref}")

    pairs = list(itertools.combinations(range(len(langs)), 2))

    def one(pair):
        i, j = pair
        try:
            return linear_cka(mats[i], mats[j], centered=centered)
        except DomainError as exc:
            raise type(exc)(f"pair ({langs[i]}, {langs[j]}): {exc}") from None

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]

    values = np.eye(len(langs))
    for (i, j), v in zip(pairs, results):
        values[i, j] = values[j, i] = v
    return PairwiseMatrix(langs, values)


# -------------------------------------------------------------------- output


def heatmap_csv(matrix: PairwiseMatrix, value_name: str = "cka") -> str:
    """CSV text with one row per unordered pair; the diagonal is never emitted."""
    lines = [f"lang_i,lang_j,{value_name}"]
    lines += [f"{a},{b},{v:.6g}" for a, b, v in matrix.pairs()]
    return "\n".join(lines) + "\n"


def write_heatmap_csv(matrix: PairwiseMatrix, path, value_name: str = "cka") -> None:
    atomic_write_text(path, heatmap_csv(matrix, value_name))
