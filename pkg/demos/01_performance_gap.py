"""
Performance gap between languages
=================================

How far apart are per-language scores of one model? Two summaries: the
relative percentage difference (RPD) of each language pair, and the spread
of the whole table (sample standard deviation plus mean pairwise RPD).
"""

from xlgap import rpd, rpd_matrix, score_spread
from xlgap.data import load_scores
from xlgap.report import bundled_toy_dir

# RPD divides the absolute gap by the pair mean, so it is symmetric and
# does not care about the scale scores are reported on
print("rpd(80, 60)     =", round(rpd(80, 60), 4))
print("rpd(0.8, 0.6)   =", round(rpd(0.8, 0.6), 4))

# a score table is a mapping from ISO 639-3 code to score
scores = load_scores(bundled_toy_dir() / "scores.json")
print("\nscores:", dict(scores.entries))

matrix = rpd_matrix(scores)
for a, b, value in matrix.pairs():
    print(f"  {a}-{b}: {value:6.2f}")

# std is taken over score / 100 with the n - 1 denominator
std, mean_rpd = score_spread(scores)
print(f"\nstd {std:.4f}  mean RPD {mean_rpd:.2f}")
