"""Anchor-text-aware hyperlink prediction on document networks.

Builds datasets from MediaWiki XML exports (abstracts, wikilinks with
their anchor texts, redirect aliases), extracts topic-centered subgraphs
with personalized PageRank, and evaluates transductive and inductive
link predictors against string-matched hard negatives.
"""

from .anchors import (
    AhoCorasick,
    AnchorMap,
    CandidatePair,
    build_anchor_map,
    build_eval_samples,
    build_title_map,
    normalize_pattern,
    scan_candidates,
)
from .dataset import Dataset
from .deepwalk import (
    DeepWalkModel,
    DeepWalkParams,
    UnsupportedModeError,
    fit_deepwalk,
    score_deepwalk,
)
from .evaluation import (
    EvalSplit,
    MetricsReport,
    UndefinedMetricError,
    pr_auc,
    precision_recall_at_prevalence,
    run_eval,
    split_inductive,
    split_transductive,
)
from .graph import (
    DocumentNetwork,
    NetworkStats,
    PprScores,
    network_stats,
    personalized_pagerank,
    topk_subgraph,
)
from .ingest import (
    AnchorOccurrence,
    Article,
    DumpParseError,
    RawPage,
    build_corpus,
    extract_abstract,
    extract_wikilinks,
    normalize_title,
    parse_dump,
    render_abstract,
    resolve_redirects,
)
from .lsa import (
    LsaModel,
    Vocabulary,
    build_tfidf,
    cosine,
    embed_text,
    fit_lsa,
    load_embeddings,
    save_embeddings,
    tokenize,
)
from .predictors import (
    AtilpModel,
    EvalModelConfig,
    ExternalFileMethod,
    Method,
    Prediction,
    compute_atilp_scores,
    fit_atilp,
    make_method,
    predict_at,
    score_atilp,
    score_lsa,
    score_random,
)

__version__ = "0.1.0"
