"""Cross-lingual performance-gap and representation-gap metrics."""

__version__ = "0.1.0"

from .data import (
    EmbeddingSet,
    GapReport,
    ProbabilitySet,
    ScoreTable,
    load_embeddings,
    load_probabilities,
    load_scores,
    mean_pool,
    read_report,
    save_embeddings,
    write_report,
)
from .divergence import (
    BoundParams,
    LabeledSample,
    SampleSet,
    StumpHypothesis,
    complexity_term,
    empirical_h_divergence,
    empirical_risk,
    h_delta_h_divergence,
    stump_pdim,
    verify_bound,
)
from .gaps import PairwiseMatrix, linear_cka, pairwise_cka, rpd, rpd_matrix, score_spread
from .phonemizer import g2p, load_inventory, load_rules, phonemize, segment, space_phonemes
from .rankstats import CorrelationResult, exact_perm_pvalue, kendall_tau_b, spearman
from .report import build_report
from .transport import SinkhornConfig, TransportPlan, cost_matrix, exact_ot, sinkhorn
