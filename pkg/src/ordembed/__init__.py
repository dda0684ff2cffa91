"""Ordinal embeddings of finite metric spaces: constructions, verifiers,
ensemble experiments and counting-based dimension certificates."""

__version__ = "0.1.0"

from ordembed.metric import FiniteMetricSpace, SimpleGraph, check_metric, girth, metric_from_graph
from ordembed.constraints import (
    Comparison,
    ConstraintSet,
    count_triplet_orderings_exact,
    extract_terminal,
    extract_topk,
    extract_triplets,
    log_superfactorial,
)
from ordembed.verify import Embedding, ViolationReport, check_constraints, distortion, relaxation
from ordembed.terminal import RankTable, TerminalEmbedding, dominance_check, embed_terminals, rank_table
from ordembed.girthlab import (
    EnsembleSpec,
    WitnessCertificate,
    ensemble_report,
    faraway_pair,
    generate_high_girth,
    pigeonhole_relaxation_check,
    sample_ensemble,
    union_bound_log,
)
from ordembed.bounds import (
    BoundQuery,
    BoundReport,
    certify_lower_bound,
    relaxation_floor,
    sign_pattern_log_bound,
    triplet_orderings_log,
)
from ordembed.baselines import FitConfig, bourgain_embed, fit_triplets, jl_project
