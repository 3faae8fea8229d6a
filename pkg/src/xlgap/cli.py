"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 numeric
failure (Sinkhorn non-convergence under ``--strict``).

JSON goes to stdout (or ``--out``) at full 64-bit precision; a rounded
one-line summary goes to stderr unless ``--quiet`` is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import atomic_write_text, dumps_json, load_embeddings, load_probabilities, load_scores, write_report
from .divergence import (
    LabeledSample,
    StumpHypothesis,
    empirical_h_divergence,
    h_delta_h_divergence,
    verify_bound,
)
from .errors import ConvergenceError, ParseError, XlgapError
from .gaps import pairwise_cka, rpd, score_spread, write_heatmap_csv
from .phonemizer import check_targets, load_inventory, load_rules, phonemize
from .rankstats import kendall_tau_b, spearman
from .report import build_report
from .transport import SinkhornConfig, sinkhorn

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _unit_interval(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def read_numeric_csv(path) -> np.ndarray:
    """Comma-separated numbers, one row per line; a non-numeric first line is a header."""
    path = Path(path)
    rows = []
    width = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        cells = raw.split(",")
        try:
            row = [float(c) for c in cells]
        except ValueError:
            if lineno == 1:
                continue
            raise ParseError("non-numeric value", path=path, line=lineno) from None
        if not all(np.isfinite(row)):
            raise ParseError("non-finite value", path=path, line=lineno)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"expected {width} values, got {len(row)}", path=path, line=lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no data rows", path=path)
    return np.array(rows)


def _emit(args, obj, summary: str):
    text = dumps_json(obj)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(summary, file=sys.stderr)


def _sinkhorn_cfg(args) -> SinkhornConfig:
    return SinkhornConfig(epsilon=args.epsilon, max_iters=args.max_iters, tolerance=args.tolerance)


# ---------------------------------------------------------------- commands


def cmd_rpd(args):
    entries = []
    for item in args.scores:
        lang, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected lang=score, got {item!r}")
        try:
            entries.append((lang, float(value)))
        except ValueError:
            raise UsageError(f"score {value!r} is not a number") from None
    if len(entries) < 2:
        raise UsageError("rpd needs at least two lang=score arguments")
    pairs = []
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            (a, sa), (b, sb) = entries[i], entries[j]
            pairs.append({"pair": [a, b], "rpd": rpd(sa, sb)})
    summary = "; ".join(f"{p['pair'][0]}-{p['pair'][1]}: {p['rpd']:.2f}" for p in pairs)
    _emit(args, pairs[0] if len(pairs) == 1 else {"pairs": pairs}, summary)


def cmd_spread(args):
    table = load_scores(args.scores)
    std, mean_rpd = score_spread(table)
    _emit(args, {"std": std, "mean_rpd": mean_rpd, "n": len(table)}, f"std {std:.4f}  mean_rpd {mean_rpd:.2f}")


def cmd_cka(args):
    sets = {}
    for path in args.embeddings:
        emb = load_embeddings(path)
        if emb.language in sets:
            raise ParseError(f"language {emb.language!r} given twice", path=path)
        sets[emb.language] = emb
    if len(sets) < 2:
        raise UsageError("cka needs at least two embedding files")
    matrix = pairwise_cka(sets, centered=not args.uncentered, workers=args.threads)
    if args.heatmap:
        write_heatmap_csv(matrix, args.heatmap)
    obj = {
        "languages": list(matrix.languages),
        "cka": matrix.values.tolist(),
        "mean_cka": matrix.mean_offdiag,
        "centered": not args.uncentered,
    }
    _emit(args, obj, f"mean CKA {matrix.mean_offdiag:.4f} over {len(sets)} languages")


def cmd_sinkhorn(args):
    p, q = load_probabilities(args.source), load_probabilities(args.target)
    result = sinkhorn(p, q, _sinkhorn_cfg(args))
    obj = {
        "pair": [p.language, q.language],
        "distance": result.cost,
        "iterations": result.iterations,
        "converged": result.converged,
        "epsilon": result.epsilon,
    }
    _emit(args, obj, f"{p.language}-{q.language}: {result.cost:.6g} ({'converged' if result.converged else 'NOT converged'})")
    if args.strict and not result.converged:
        raise ConvergenceError(f"no convergence within {args.max_iters} iterations")


def cmd_corr(args):
    data = read_numeric_csv(args.data)
    if data.shape[1] != 2:
        raise ParseError(f"expected two columns, got {data.shape[1]}", path=args.data)
    fn = spearman if args.method == "spearman" else kendall_tau_b
    result = fn(data[:, 0], data[:, 1], p_method=args.p_method)
    _emit(args, result.to_json(), f"{result.method}: {result.coefficient:.3f} (p={result.p_value:.2e}, {result.p_method})")


def _labeled(path) -> LabeledSample:
    data = read_numeric_csv(path)
    if data.shape[1] < 2:
        raise ParseError("labeled CSV needs x1..xd and a label column", path=path)
    try:
        return LabeledSample(data[:, :-1], data[:, -1])
    except XlgapError as exc:
        raise ParseError(str(exc), path=path) from None


def cmd_bound(args):
    a, b = _labeled(args.sample_a), _labeled(args.sample_b)
    h = StumpHypothesis(args.dim, args.threshold, le_is_one=args.polarity == "le")
    check = verify_bound(a, b, h, delta=args.delta, pdim=args.pdim, budget=args.budget)
    _emit(args, check.to_json(), f"gap {check.gap:.4f} <= bound {check.bound:.4f}: {check.holds}")


def cmd_hdiv(args):
    a, b = read_numeric_csv(args.sample_a), read_numeric_csv(args.sample_b)
    if args.labeled:
        a, b = a[:, :-1], b[:, :-1]
    obj = {"h_div": empirical_h_divergence(a, b), "hdh_div": h_delta_h_divergence(a, b, budget=args.budget)}
    _emit(args, obj, f"H-div {obj['h_div']:.4f}  HdH-div {obj['hdh_div']:.4f}")


def cmd_phonemize(args):
    table = load_rules(args.rules)
    inventory = load_inventory(args.inventory)
    check_targets(table, inventory)
    out = [phonemize(line, table, inventory, passthrough=args.passthrough) for line in sys.stdin.read().splitlines()]
    text = "".join(line + "\n" for line in out)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_report(args):
    cfg = _sinkhorn_cfg(args)
    report = build_report(args.directory, centered=not args.uncentered, sinkhorn_cfg=cfg, workers=args.threads)
    write_report(report, args.out, heatmap_path=args.heatmap)
    if not args.quiet:
        print(
            f"{len(report.languages)} languages  std {report.std:.4f}  mean_rpd {report.mean_rpd:.2f}  "
            f"mean_cka {report.meta['mean_cka']:.4f}",
            file=sys.stderr,
        )
    converged = report.meta.get("sinkhorn_converged", {})
    if args.strict and not all(converged.values()):
        raise ConvergenceError("Sinkhorn did not converge for some language pair")


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xlgap", description="Cross-lingual performance and representation gap metrics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, out=True):
        p = sub.add_parser(name, help=help, description=help)
        p.set_defaults(func=func)
        if out:
            p.add_argument("--out", type=Path, help="write JSON here instead of stdout")
            p.add_argument("--quiet", action="store_true", help="suppress the rounded summary on stderr")
        return p

    def sinkhorn_opts(p):
        p.add_argument("--epsilon", type=_positive_float, default=0.05, help="entropic regularization weight")
        p.add_argument("--max-iters", type=_positive_int, default=10000, help="iteration budget per pair")
        p.add_argument("--tolerance", type=_positive_float, default=1e-9, help="max marginal violation")
        p.add_argument("--strict", action="store_true", help="exit 3 if any pair fails to converge")

    p = add("rpd", cmd_rpd, "relative percentage difference between language scores")
    p.add_argument("scores", nargs="+", metavar="LANG=SCORE")

    p = add("spread", cmd_spread, "standard deviation and mean RPD of a score table")
    p.add_argument("scores", type=Path, help="JSON object of language -> score")

    p = add("cka", cmd_cka, "pairwise linear CKA between embedding files")
    p.add_argument("embeddings", nargs="+", type=Path, help="embedding CSV or .bin files")
    p.add_argument("--uncentered", action="store_true", help="skip column centering")
    p.add_argument("--heatmap", type=Path, help="also write the pairwise heatmap CSV")
    p.add_argument("--threads", type=_positive_int, default=1)

    p = add("sinkhorn", cmd_sinkhorn, "entropic OT distance between two probability files")
    p.add_argument("source", type=Path)
    p.add_argument("target", type=Path)
    sinkhorn_opts(p)

    p = add("corr", cmd_corr, "rank correlation of a two-column CSV")
    p.add_argument("data", type=Path)
    p.add_argument("--method", choices=["spearman", "kendall"], default="spearman")
    p.add_argument("--p-method", choices=["exact_permutation", "asymptotic"], default=None,
                   help="default: exact for n <= 10, asymptotic otherwise")

    p = add("bound", cmd_bound, "check the divergence bound on two labeled samples")
    p.add_argument("sample_a", type=Path, help="CSV rows x1,...,xd,label")
    p.add_argument("sample_b", type=Path)
    p.add_argument("--dim", type=int, default=0, help="stump coordinate")
    p.add_argument("--threshold", type=float, required=True, help="stump threshold")
    p.add_argument("--polarity", choices=["le", "gt"], default="le", help="which side of the threshold predicts 1")
    p.add_argument("--delta", type=_unit_interval, default=0.05)
    p.add_argument("--pdim", type=_positive_int, default=None, help="default: stump VC bound for the input dimension")
    p.add_argument("--budget", type=_positive_int, default=10**6, help="max stump pairs to enumerate")

    p = add("hdiv", cmd_hdiv, "empirical H- and HdH-divergence between two samples")
    p.add_argument("sample_a", type=Path)
    p.add_argument("sample_b", type=Path)
    p.add_argument("--labeled", action="store_true", help="inputs carry a trailing label column to ignore")
    p.add_argument("--budget", type=_positive_int, default=10**6)

    p = add("phonemize", cmd_phonemize, "G2P, segmentation and phoneme spacing, stdin to stdout", out=False)
    p.add_argument("--rules", type=Path, required=True, help="rule TSV")
    p.add_argument("--inventory", type=Path, required=True, help="one IPA unit per line")
    p.add_argument("--passthrough", action="store_true", help="copy unmatched characters instead of failing")
    p.add_argument("--out", type=Path)

    p = add("report", cmd_report, "full gap report for a directory of per-language files", out=False)
    p.add_argument("directory", type=Path)
    p.add_argument("--out", type=Path, required=True, help="report JSON path")
    p.add_argument("--heatmap", type=Path, help="CKA heatmap CSV path")
    p.add_argument("--uncentered", action="store_true")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--quiet", action="store_true")
    sinkhorn_opts(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"xlgap {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"xlgap {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (XlgapError, ValueError, OSError) as exc:
        print(f"xlgap {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
