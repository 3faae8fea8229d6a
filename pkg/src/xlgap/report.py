"""Assemble a full gap report from a directory of per-language files.

Directory layout::

    scores.json          {"<lang>": score, ...}; key order fixes the language order
    <lang>.emb.csv       embedding CSV   (or <lang>.emb.bin in the XLG1 binary format)
    <lang>.prob.csv      optional class-probability rows; Sinkhorn runs only
                         when every language has one
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from .data import GapReport, load_embeddings, load_probabilities, load_scores
from .errors import ParseError
from .gaps import pairwise_cka, rpd_matrix, score_spread
from .transport import SinkhornConfig, sinkhorn


def bundled_toy_dir() -> Path:
    """Path of the 3-language toy dataset shipped with the package."""
    return Path(str(resources.files("xlgap") / "data" / "toy"))


def _embedding_path(directory: Path, lang: str) -> Path:
    for suffix in (".emb.csv", ".emb.bin"):
        p = directory / f"{lang}{suffix}"
        if p.exists():
            return p
    raise ParseError(f"no embedding file for language {lang!r}", path=directory)


def build_report(directory, *, centered: bool = True, sinkhorn_cfg: SinkhornConfig | None = None,
                 workers: int = 1) -> GapReport:
    directory = Path(directory)
    scores = load_scores(directory / "scores.json")
    langs = scores.languages
    if len(langs) < 2:
        raise ParseError("need at least two languages", path=directory / "scores.json")

    embeddings = {}
    for lang in langs:
        path = _embedding_path(directory, lang)
        emb = load_embeddings(path, language=lang)
        if emb.language != lang:
            raise ParseError(f"file declares language {emb.language!r}, expected {lang!r}", path=path)
        embeddings[lang] = emb

    std, mean_rpd = score_spread(scores)
    cka = pairwise_cka(embeddings, centered=centered, workers=workers)

    meta = {
        "centered": centered,
        "mean_cka": cka.mean_offdiag,
        "n_sentences": embeddings[langs[0]].n,
    }

    sink_matrix = None
    prob_paths = {lang: directory / f"{lang}.prob.csv" for lang in langs}
    if all(p.exists() for p in prob_paths.values()):
        cfg = sinkhorn_cfg or SinkhornConfig()
        probs = {lang: load_probabilities(p) for lang, p in prob_paths.items()}
        pairs = list(itertools.combinations(range(len(langs)), 2))

        def one(pair):
            i, j = pair
            return sinkhorn(probs[langs[i]], probs[langs[j]], cfg)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                plans = list(pool.map(one, pairs))
        else:
            plans = [one(p) for p in pairs]

        sink_matrix = np.zeros((len(langs), len(langs)))
        converged = {}
        for (i, j), plan in zip(pairs, plans):
            sink_matrix[i, j] = sink_matrix[j, i] = plan.cost
            converged[f"{langs[i]}-{langs[j]}"] = plan.converged
        meta.update(
            {
                "epsilon": cfg.epsilon,
                "max_iters": cfg.max_iters,
                "tolerance": cfg.tolerance,
                "sinkhorn_converged": converged,
            }
        )

    return GapReport(
        languages=tuple(langs),
        rpd=rpd_matrix(scores).values,
        std=std,
        mean_rpd=mean_rpd,
        cka=cka.values,
        sinkhorn=sink_matrix,
        meta=meta,
    )
