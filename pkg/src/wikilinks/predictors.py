"""Link scoring models under one contract.

Binary string matchers (title and anchor maps), text similarity (LSA),
graph similarity (DeepWalk) and the anchor-informed linear model that
rescores the anchor-map candidates with a least squares fit over three
cosine features: anchor-source, anchor-target and source-target
similarity. Every model exposes a scorer over (source, target) pairs
producing scores in [0, 1]; binary models emit exactly 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .anchors import AnchorMap, CandidatePair, scan_candidates
from .deepwalk import DeepWalkParams, fit_deepwalk, score_deepwalk
from .graph import DocumentNetwork
from .ingest import Article
from .lsa import LsaModel, build_tfidf, cosine, embed_text, fit_lsa, tokenize

Scorer = Callable[[Sequence[tuple[int, int]]], np.ndarray]


@dataclass(frozen=True)
class Prediction:
    """One scored pair; ``score`` lies in [0, 1]."""

    source: int
    target: int
    score: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.score) or not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


def predict_at(anchor_map: AnchorMap, source: Article, target: int) -> int:
    """String-matching prediction: 1 iff the source abstract contains a
    string mapping to the target. Works with title and anchor maps."""
    if not 0 <= target < anchor_map.article_count:
        raise ValueError(f"unknown target article id {target}")
    return int(any(pair.target == target for pair in scan_candidates(anchor_map, source)))


def score_lsa_vectors(u: np.ndarray, v: np.ndarray) -> float:
    """Map a cosine similarity monotonically onto [0, 1]."""
    return (1.0 + cosine(u, v)) / 2.0


def score_lsa(model: LsaModel, source: int, target: int) -> float:
    """Similarity score between two training documents of an LSA model
    whose rows are indexed by document id."""
    return score_lsa_vectors(model.doc_embeddings[source], model.doc_embeddings[target])


def score_random(rng: np.random.Generator) -> float:
    """Next uniform [0, 1] draw; reproducible given the generator seed."""
    return float(rng.random())


def ols_fit(features: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, float]:
    """Ordinary least squares with an intercept, no normalization or
    regularization. Rank-deficient designs get the minimum-norm solution."""
    features = np.asarray(features, dtype=float)
    design = np.hstack([features, np.ones((features.shape[0], 1))])
    solution, *_ = np.linalg.lstsq(design, np.asarray(targets, dtype=float), rcond=None)
    return solution[:-1], float(solution[-1])


@dataclass
class AtilpModel:
    """Linear model over the (s1, s2, s3) anchor/document cosine scores."""

    coefficients: np.ndarray
    intercept: float
    lsa: LsaModel
    n_positive: int = 0
    n_negative: int = 0


def _anchor_triples(
    lsa: LsaModel,
    anchor_texts: Sequence[str],
    source_vec: np.ndarray,
    target_vec: np.ndarray,
) -> np.ndarray:
    s3 = cosine(source_vec, target_vec)
    rows = []
    for text in anchor_texts:
        anchor_vec = embed_text(lsa, text)
        rows.append((cosine(anchor_vec, source_vec), cosine(anchor_vec, target_vec), s3))
    return np.array(rows)


def compute_atilp_scores(
    lsa: LsaModel,
    pair: CandidatePair,
    source_vec: np.ndarray | None = None,
    target_vec: np.ndarray | None = None,
) -> np.ndarray:
    """(s1, s2, s3) triples, one row per distinct matched anchor string.

    s1 = cos(anchor, source), s2 = cos(anchor, target),
    s3 = cos(source, target). Document vectors default to the model's
    training embeddings; pass ``source_vec`` for unseen documents.
    """
    if source_vec is None:
        source_vec = lsa.doc_embeddings[pair.source]
    if target_vec is None:
        target_vec = lsa.doc_embeddings[pair.target]
    return _anchor_triples(lsa, pair.anchor_texts(), source_vec, target_vec)


def fit_atilp(
    network: DocumentNetwork,
    lsa: LsaModel,
    candidates_by_source: Mapping[int, Sequence[CandidatePair]],
    seed: int = 0,
    n_positive: int = 1000,
    n_negative: int = 1000,
    sources: Iterable[int] | None = None,
    targets: Iterable[int] | None = None,
    doc_vector: Callable[[int], np.ndarray] | None = None,
) -> AtilpModel:
    """Least squares fit of the anchor-informed link model.

    Positives are sampled uniformly from training edges that appear
    among the anchor-map candidates, negatives from candidate non-edges;
    when fewer than requested exist, all are taken and the shortfall is
    visible in ``n_positive``/``n_negative`` of the returned model. Each
    sampled pair contributes one design row per distinct matched anchor
    string. ``sources``/``targets`` restrict the training pairs to the
    given documents (the harness passes the training documents, so
    hidden documents never reach the fit).
    """
    if sources is None:
        sources = sorted(candidates_by_source)
    target_set = None if targets is None else set(targets)
    positives: list[CandidatePair] = []
    negatives: list[CandidatePair] = []
    for source in sorted(sources):
        for pair in candidates_by_source.get(source, ()):
            if target_set is not None and pair.target not in target_set:
                continue
            if network.has_edge(pair.source, pair.target):
                positives.append(pair)
            else:
                negatives.append(pair)
    if not positives or not negatives:
        raise ValueError(
            f"need candidates of both labels to fit: "
            f"{len(positives)} positives, {len(negatives)} negatives"
        )
    rng = np.random.default_rng(seed)

    def sample(pairs: list[CandidatePair], count: int) -> list[CandidatePair]:
        if len(pairs) <= count:
            return pairs
        chosen = rng.permutation(len(pairs))[:count]
        return [pairs[i] for i in sorted(chosen)]

    sampled_pos = sample(positives, n_positive)
    sampled_neg = sample(negatives, n_negative)

    if doc_vector is None:
        doc_vector = lambda doc: lsa.doc_embeddings[doc]  # noqa: E731
    rows: list[np.ndarray] = []
    labels: list[float] = []
    for label, pairs in ((1.0, sampled_pos), (0.0, sampled_neg)):
        for pair in pairs:
            triples = _anchor_triples(
                lsa, pair.anchor_texts(), doc_vector(pair.source), doc_vector(pair.target)
            )
            rows.append(triples)
            labels.extend([label] * len(triples))
    coefficients, intercept = ols_fit(np.vstack(rows), np.array(labels))
    return AtilpModel(
        coefficients=coefficients,
        intercept=intercept,
        lsa=lsa,
        n_positive=len(sampled_pos),
        n_negative=len(sampled_neg),
    )


def score_atilp(
    model: AtilpModel,
    pair: CandidatePair,
    source_vec: np.ndarray | None = None,
    target_vec: np.ndarray | None = None,
) -> float:
    """Linear prediction maximized over the pair's matched anchors,
    clamped to [0, 1]."""
    triples = compute_atilp_scores(model.lsa, pair, source_vec, target_vec)
    raw = triples @ model.coefficients + model.intercept
    return float(np.clip(raw.max(), 0.0, 1.0))


@dataclass(frozen=True)
class EvalModelConfig:
    """Model hyperparameters used by the evaluation harness."""

    lsa_dimension: int = 512
    svd_method: str = "auto"
    deepwalk: DeepWalkParams = field(default_factory=DeepWalkParams)
    atilp_positives: int = 1000
    atilp_negatives: int = 1000


class RunContext:
    """Everything one evaluation run offers the predictors.

    Exposes the training network and the set of documents whose text may
    be used for fitting; hidden documents contribute only their text at
    scoring time, through :meth:`doc_vector`. The LSA model for the run
    is fitted lazily on the training documents and shared between the
    LSA and ATILP methods.
    """

    def __init__(
        self,
        articles: Sequence[Article],
        full_network: DocumentNetwork,
        train_network: DocumentNetwork,
        train_nodes: Sequence[int],
        mode: str,
        seed: int,
        anchor_map: AnchorMap,
        title_map: AnchorMap,
        candidates: Mapping[int, Sequence[CandidatePair]],
        title_candidates: Mapping[int, Sequence[CandidatePair]],
        config: EvalModelConfig,
    ) -> None:
        self.articles = articles
        self.full_network = full_network
        self.train_network = train_network
        self.train_nodes = frozenset(train_nodes)
        self.mode = mode
        self.seed = seed
        self.anchor_map = anchor_map
        self.title_map = title_map
        self.candidates = candidates
        self.title_candidates = title_candidates
        self.config = config
        self._lsa: LsaModel | None = None
        self._lsa_rows: dict[int, int] | None = None
        self._fold_in_cache: dict[int, np.ndarray] = {}
        self._pair_index: dict[tuple[int, int], CandidatePair] | None = None

    def lsa(self) -> tuple[LsaModel, dict[int, int]]:
        if self._lsa is None:
            docs = sorted(self.train_nodes)
            corpus = [tokenize(self.articles[doc].abstract) for doc in docs]
            matrix, vocabulary = build_tfidf(corpus)
            self._lsa = fit_lsa(
                matrix,
                self.config.lsa_dimension,
                seed=self.seed,
                vocabulary=vocabulary,
                method=self.config.svd_method,
            )
            self._lsa_rows = {doc: row for row, doc in enumerate(docs)}
        return self._lsa, self._lsa_rows

    def doc_vector(self, doc: int) -> np.ndarray:
        """Training documents use their fitted embedding; hidden documents
        fold in from their text alone."""
        model, rows = self.lsa()
        row = rows.get(doc)
        if row is not None:
            return model.doc_embeddings[row]
        cached = self._fold_in_cache.get(doc)
        if cached is None:
            cached = embed_text(model, self.articles[doc].abstract)
            self._fold_in_cache[doc] = cached
        return cached

    def candidate_pair(self, source: int, target: int) -> CandidatePair | None:
        if self._pair_index is None:
            self._pair_index = {
                (pair.source, pair.target): pair
                for pairs in self.candidates.values()
                for pair in pairs
            }
        return self._pair_index.get((source, target))


class Method:
    """A named predictor the harness can fit once per run and mode."""

    name: str = ""
    binary: bool = False
    supports_inductive: bool = True

    def make_scorer(self, ctx: RunContext) -> Scorer:
        raise NotImplementedError


class RandomMethod(Method):
    name = "random"

    def make_scorer(self, ctx: RunContext) -> Scorer:
        rng = np.random.default_rng(ctx.seed)
        return lambda pairs: rng.random(len(pairs))


class _AtMethod(Method):
    binary = True
    map_attr = ""

    def make_scorer(self, ctx: RunContext) -> Scorer:
        candidates = ctx.candidates if self.map_attr == "anchor" else ctx.title_candidates
        targets = {
            source: {pair.target for pair in pairs} for source, pairs in candidates.items()
        }

        def scorer(pairs: Sequence[tuple[int, int]]) -> np.ndarray:
            return np.array(
                [1.0 if t in targets.get(s, ()) else 0.0 for s, t in pairs]
            )

        return scorer


class AtTitleMethod(_AtMethod):
    name = "at_title"
    map_attr = "title"


class AtAnchorMethod(_AtMethod):
    name = "at_anchor"
    map_attr = "anchor"


class LsaMethod(Method):
    name = "lsa"

    def make_scorer(self, ctx: RunContext) -> Scorer:
        def scorer(pairs: Sequence[tuple[int, int]]) -> np.ndarray:
            return np.array(
                [score_lsa_vectors(ctx.doc_vector(s), ctx.doc_vector(t)) for s, t in pairs]
            )

        return scorer


class DeepWalkMethod(Method):
    name = "deepwalk"
    supports_inductive = False

    def make_scorer(self, ctx: RunContext) -> Scorer:
        model = fit_deepwalk(
            ctx.train_network,
            ctx.config.deepwalk,
            seed=ctx.seed,
            nodes=sorted(ctx.train_nodes),
        )

        def scorer(pairs: Sequence[tuple[int, int]]) -> np.ndarray:
            return np.array([score_deepwalk(model, s, t) for s, t in pairs])

        return scorer


class AtilpMethod(Method):
    name = "atilp"

    def make_scorer(self, ctx: RunContext) -> Scorer:
        lsa_model, _ = ctx.lsa()
        model = fit_atilp(
            ctx.train_network,
            lsa_model,
            ctx.candidates,
            seed=ctx.seed,
            n_positive=ctx.config.atilp_positives,
            n_negative=ctx.config.atilp_negatives,
            sources=sorted(set(ctx.candidates) & ctx.train_nodes),
            targets=ctx.train_nodes,
            doc_vector=ctx.doc_vector,
        )

        def scorer(pairs: Sequence[tuple[int, int]]) -> np.ndarray:
            scores = []
            for s, t in pairs:
                pair = ctx.candidate_pair(s, t)
                if pair is None:
                    scores.append(0.0)  # non-candidates stay unlinked
                else:
                    scores.append(
                        score_atilp(model, pair, ctx.doc_vector(s), ctx.doc_vector(t))
                    )
            return np.array(scores)

        return scorer


class ExternalFileMethod(Method):
    """Scores read from a predictions.tsv file keyed by (source, target).

    Lets externally produced methods plug into the harness; pairs absent
    from the file score 0.
    """

    def __init__(self, name: str, path) -> None:
        from .dataset import read_predictions_tsv

        self.name = name
        self._scores = {(s, t): score for s, t, score in read_predictions_tsv(path)}

    def make_scorer(self, ctx: RunContext) -> Scorer:
        return lambda pairs: np.array([self._scores.get(pair, 0.0) for pair in pairs])


_BUILTIN_METHODS: dict[str, Callable[[], Method]] = {
    "random": RandomMethod,
    "at_title": AtTitleMethod,
    "at_anchor": AtAnchorMethod,
    "lsa": LsaMethod,
    "deepwalk": DeepWalkMethod,
    "atilp": AtilpMethod,
}


def make_method(spec: str | Method) -> Method:
    """Resolve a method name to its built-in implementation."""
    if isinstance(spec, Method):
        return spec
    try:
        return _BUILTIN_METHODS[spec]()
    except KeyError:
        raise ValueError(
            f"unknown method {spec!r}; available: {', '.join(sorted(_BUILTIN_METHODS))}"
        ) from None
