"""
A complete gap report
=====================

``build_report`` reads a directory with ``scores.json``, one embedding file
per language and optional class-probability files, then collects RPD,
spread, pairwise CKA and Sinkhorn distances in one report. Writing it is
deterministic: the same inputs give the same bytes.
"""

import tempfile
from pathlib import Path

from xlgap.data import write_report
from xlgap.report import build_report, bundled_toy_dir

report = build_report(bundled_toy_dir())
print("languages:", report.languages)
print(f"std {report.std:.4f}  mean RPD {report.mean_rpd:.2f}  mean CKA {report.meta['mean_cka']:.4f}")
print("Sinkhorn converged:", report.meta["sinkhorn_converged"])

with tempfile.TemporaryDirectory() as tmp:
    out, heat = Path(tmp) / "report.json", Path(tmp) / "cka.csv"
    write_report(report, out, heatmap_path=heat)
    print("\n" + heat.read_text(), end="")
    first = out.read_bytes()
    write_report(build_report(bundled_toy_dir(), workers=4), out, heatmap_path=heat)
    print("\nidentical bytes with 4 workers:", out.read_bytes() == first)
