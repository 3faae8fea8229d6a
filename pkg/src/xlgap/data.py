"""Domain types, file readers and report serialization."""

from __future__ import annotations

import json
import math
import os
import re
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import DomainError, ParseError

BINARY_MAGIC = b"XLG1"
_BIN_HEADER = struct.Struct("<4sII")
_LANG_RE = re.compile(r"^[a-z0-9]+$")
SIMPLEX_ATOL = 1e-9


def check_language(code: str) -> str:
    if not isinstance(code, str) or not _LANG_RE.match(code):
        raise DomainError(f"invalid language code {code!r}: expected lowercase ASCII alphanumerics")
    return code


def _frozen_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DomainError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScoreTable:
    """Per-language downstream scores on the 0-100 percentage scale."""

    entries: Mapping[str, float]

    def __post_init__(self):
        clean = {}
        for lang, score in self.entries.items():
            check_language(lang)
            score = float(score)
            if not math.isfinite(score):
                raise DomainError(f"score for {lang!r} is not finite")
            clean[lang] = score
        object.__setattr__(self, "entries", MappingProxyType(clean))

    @property
    def languages(self) -> list[str]:
        return list(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, lang):
        return self.entries[lang]


@dataclass(frozen=True)
class EmbeddingSet:
    """Sentence representations for one language, one row per sentence."""

    language: str
    matrix: np.ndarray

    def __post_init__(self):
        check_language(self.language)
        m = _frozen_matrix(self.matrix, "embedding matrix")
        if m.shape[0] < 2 or m.shape[1] < 1:
            raise DomainError(f"embedding matrix needs n >= 2 and d >= 1, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class ProbabilitySet:
    """Rows of class probabilities (one row per sentence) for one language."""

    language: str
    rows: np.ndarray

    def __post_init__(self):
        check_language(self.language)
        r = _frozen_matrix(self.rows, "probability rows")
        if r.shape[0] < 1 or r.shape[1] < 1:
            raise DomainError(f"probability set must be non-empty, got {r.shape}")
        if np.any(r < 0) or np.any(r > 1):
            raise DomainError("probabilities must lie in [0, 1]")
        bad = np.flatnonzero(np.abs(r.sum(axis=1) - 1.0) > SIMPLEX_ATOL)
        if bad.size:
            raise DomainError(f"row {int(bad[0])} does not sum to 1")
        object.__setattr__(self, "rows", r)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1]


def mean_pool(tokens) -> np.ndarray:
    """Average a sentence's token vectors into one sentence vector.

    ``tokens`` is a (length, d) array or a list of equal-length vectors.
    """
    arr = np.asarray(tokens, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("mean_pool needs a non-empty (length, d) token sequence")
    return arr.mean(axis=0)


# ---------------------------------------------------------------- embeddings


def _parse_header(line: str, path, keys: tuple[str, ...]) -> dict:
    fields = {}
    for part in line.strip().split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {part!r}", path=path, line=1)
        fields[key.strip()] = value.strip()
    if set(fields) != set(keys):
        raise ParseError(f"header must contain exactly {', '.join(keys)}", path=path, line=1)
    out = {}
    for key in keys:
        if key == "lang":
            out[key] = fields[key]
            continue
        try:
            out[key] = int(fields[key])
        except ValueError:
            raise ParseError(f"header field {key} is not an integer", path=path, line=1) from None
        if out[key] < 0:
            raise ParseError(f"header field {key} is negative", path=path, line=1)
    return out


def _read_csv_matrix(path, width_key: str):
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", path=path, line=1)
    header = _parse_header(lines[0], path, ("lang", "n", width_key))
    n, width = header["n"], header[width_key]
    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != width:
            raise ParseError(f"expected {width} values, got {len(cells)}", path=path, line=lineno)
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise ParseError("non-numeric value", path=path, line=lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError("non-finite value", path=path, line=lineno)
        rows.append(row)
    if len(rows) != n:
        raise ParseError(f"header declares n={n} rows, found {len(rows)}", path=path)
    return header["lang"], np.array(rows, dtype=np.float64).reshape(n, width)


def _read_binary_matrix(path):
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _BIN_HEADER.size:
        raise ParseError("truncated header", path=path, offset=len(blob))
    magic, n, d = _BIN_HEADER.unpack_from(blob, 0)
    if magic != BINARY_MAGIC:
        raise ParseError(f"bad magic {magic!r}", path=path, offset=0)
    expected = _BIN_HEADER.size + 4 * n * d
    if len(blob) != expected:
        raise ParseError(f"expected {expected} bytes for {n}x{d}, got {len(blob)}", path=path, offset=len(blob))
    values = np.frombuffer(blob, dtype="<f4", count=n * d, offset=_BIN_HEADER.size)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ParseError("non-finite value", path=path, offset=_BIN_HEADER.size + 4 * int(bad[0]))
    return values.astype(np.float64).reshape(n, d)


def load_embeddings(path, format: str | None = None, language: str | None = None) -> EmbeddingSet:
    """Read an embedding matrix from CSV or the ``XLG1`` binary format.

    ``format`` defaults to the file suffix (``.bin`` means binary). Binary
    files carry no language tag, so ``language`` falls back to the file stem
    up to the first dot.
    """
    path = Path(path)
    if format is None:
        format = "binary" if path.suffix == ".bin" else "csv"
    if format == "csv":
        lang, matrix = _read_csv_matrix(path, "d")
    elif format == "binary":
        lang, matrix = language or path.name.split(".")[0], _read_binary_matrix(path)
    else:
        raise ValueError(f"unknown embedding format {format!r}")
    try:
        return EmbeddingSet(lang, matrix)
    except DomainError as exc:
        raise ParseError(str(exc), path=path) from None


def save_embeddings(emb: EmbeddingSet, path, format: str = "csv") -> None:
    """Write ``emb``; binary output is float32, so values are rounded to single precision."""
    if format == "csv":
        lines = [f"lang={emb.language},n={emb.n},d={emb.d}"]
        lines += [",".join(repr(float(v)) for v in row) for row in emb.matrix]
        atomic_write_text(path, "\n".join(lines) + "\n")
    elif format == "binary":
        payload = _BIN_HEADER.pack(BINARY_MAGIC, emb.n, emb.d) + emb.matrix.astype("<f4").tobytes()
        atomic_write_bytes(path, payload)
    else:
        raise ValueError(f"unknown embedding format {format!r}")


def load_probabilities(path) -> ProbabilitySet:
    """CSV with header ``lang=<code>,n=<int>,k=<int>`` then n rows of k probabilities."""
    lang, rows = _read_csv_matrix(path, "k")
    try:
        return ProbabilitySet(lang, rows)
    except DomainError as exc:
        raise ParseError(str(exc), path=path) from None


# -------------------------------------------------------------------- scores


def _no_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ParseError(f"duplicate language {key!r}")
        out[key] = value
    return out


def parse_scores(text: str, path=None) -> ScoreTable:
    try:
        obj = json.loads(text, object_pairs_hook=_no_duplicates)
    except ParseError as exc:
        raise ParseError(str(exc), path=path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("score file must be a JSON object", path=path)
    for lang, value in obj.items():
        # bool is an int subclass; "true" is not a score
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"score for {lang!r} is not a number", path=path)
    try:
        return ScoreTable(obj)
    except DomainError as exc:
        raise ParseError(str(exc), path=path) from None


def load_scores(path) -> ScoreTable:
    return parse_scores(Path(path).read_text(encoding="utf-8"), path=path)


# -------------------------------------------------------------------- report


@dataclass(frozen=True)
class GapReport:
    languages: tuple[str, ...]
    rpd: np.ndarray
    std: float
    mean_rpd: float
    cka: np.ndarray
    sinkhorn: np.ndarray | None = None
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        langs = tuple(check_language(c) for c in self.languages)
        object.__setattr__(self, "languages", langs)
        n = len(langs)
        for name, diag in (("rpd", 0.0), ("cka", 1.0), ("sinkhorn", 0.0)):
            value = getattr(self, name)
            if value is None:
                continue
            m = _frozen_matrix(value, name)
            if m.shape != (n, n):
                raise DomainError(f"{name} matrix must be {n}x{n}, got {m.shape}")
            if not np.array_equal(m, m.T):
                raise DomainError(f"{name} matrix is not symmetric")
            if not np.all(np.diag(m) == diag):
                raise DomainError(f"{name} diagonal must be {diag}")
            object.__setattr__(self, name, m)

    def to_json(self) -> dict:
        return {
            "languages": list(self.languages),
            "rpd": self.rpd.tolist(),
            "std": float(self.std),
            "mean_rpd": float(self.mean_rpd),
            "cka": self.cka.tolist(),
            "sinkhorn": None if self.sinkhorn is None else self.sinkhorn.tolist(),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GapReport":
        return cls(
            languages=tuple(obj["languages"]),
            rpd=np.array(obj["rpd"], dtype=np.float64),
            std=obj["std"],
            mean_rpd=obj["mean_rpd"],
            cka=np.array(obj["cka"], dtype=np.float64),
            sinkhorn=None if obj.get("sinkhorn") is None else np.array(obj["sinkhorn"], dtype=np.float64),
            meta=obj.get("meta", {}),
        )


def dumps_json(obj) -> str:
    # repr-based float formatting round-trips every 64-bit value exactly
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_report(report: GapReport, path, heatmap_path=None) -> None:
    """Write ``report`` as JSON and, if ``heatmap_path`` is given, its CKA heatmap CSV."""
    from .gaps import PairwiseMatrix, write_heatmap_csv

    atomic_write_text(path, dumps_json(report.to_json()))
    if heatmap_path is not None:
        write_heatmap_csv(PairwiseMatrix(report.languages, report.cka), heatmap_path)


def read_report(path) -> GapReport:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return GapReport.from_json(obj)
    except (KeyError, TypeError, json.JSONDecodeError, DomainError) as exc:
        raise ParseError(f"not a gap report: {exc}", path=path) from None


# ------------------------------------------------------------ atomic writes


def atomic_write_bytes(path, payload: bytes) -> None:
    """Write via a sibling temp file and rename, so no partial file is ever visible."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))
