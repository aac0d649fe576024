"""AT / LSA / ATILP / random predictors and their oracles."""

from __future__ import annotations

import numpy as np
import pytest

from wikilinks.anchors import AnchorMap, CandidatePair, build_anchor_map
from wikilinks.graph import DocumentNetwork
from wikilinks.ingest import Article
from wikilinks.lsa import build_tfidf, cosine, embed_text, fit_lsa, tokenize
from wikilinks.predictors import (
    ExternalFileMethod,
    Method,
    Prediction,
    compute_atilp_scores,
    fit_atilp,
    make_method,
    ols_fit,
    predict_at,
    score_atilp,
    score_lsa,
    score_random,
)

from test_lsa import dense_svd_oracle


def _map(patterns: dict[str, set[int]], count: int, mode: str = "anchor") -> AnchorMap:
    return AnchorMap(
        mode=mode,
        patterns={p: frozenset(ids) for p, ids in patterns.items()},
        article_count=count,
    )


def _article(doc_id: int, abstract: str, title: str | None = None) -> Article:
    return Article(id=doc_id, title=title or f"T{doc_id}", abstract=abstract)


def _lsa_over(texts: list[str], d: int = 3):
    corpus = [tokenize(t) for t in texts]
    matrix, vocab = build_tfidf(corpus)
    return fit_lsa(matrix, d=d, vocabulary=vocab), matrix


class TestPrediction:
    def test_rejects_out_of_range_scores(self):
        with pytest.raises(ValueError):
            Prediction(0, 1, 1.5)
        with pytest.raises(ValueError):
            Prediction(0, 1, float("nan"))
        assert Prediction(0, 1, 1.0).score == 1.0


class TestPredictAt:
    def test_true_edge_is_predicted_with_anchor_map(self, fixture_dataset):
        anchor_map = fixture_dataset.anchor_map()
        for source, target in list(fixture_dataset.network.edges())[:20]:
            assert predict_at(anchor_map, fixture_dataset.articles[source], target) == 1

    def test_absent_patterns_predict_zero(self):
        anchor_map = _map({"missing phrase": {1}}, 2)
        assert predict_at(anchor_map, _article(0, "unrelated text"), 1) == 0

    def test_unknown_target_errors(self):
        anchor_map = _map({"x": {0}}, 1)
        with pytest.raises(ValueError):
            predict_at(anchor_map, _article(0, "x"), 7)

    def test_title_vs_anchor_mode_on_derived_forms(self):
        # "political" is not the title "Politics": the title map misses it,
        # an anchor map that saw "political" on an edge catches it.
        abstract = "the country faced a political crisis"
        article = _article(0, abstract)
        title_map = _map({"politics": {1}}, 2, mode="title")
        anchor_map = _map({"political": {1}}, 2, mode="anchor")
        assert predict_at(title_map, article, 1) == 0
        assert predict_at(anchor_map, article, 1) == 1


class TestScoreLsa:
    def test_identical_abstracts_score_one(self):
        model, _ = _lsa_over(["alpha beta gamma", "alpha beta gamma", "other words here"])
        assert score_lsa(model, 0, 1) == pytest.approx(1.0, abs=1e-9)

    def test_all_oov_document_scores_half(self):
        model, _ = _lsa_over(["shared shared alpha", "shared beta", "completely different"])
        hidden = embed_text(model, "nothing known")
        from wikilinks.predictors import score_lsa_vectors

        assert score_lsa_vectors(hidden, model.doc_embeddings[0]) == 0.5

    def test_four_doc_fixture_matches_dense_oracle(self):
        texts = [
            "war army battle victory",
            "army battle defeat",
            "market economy trade",
            "trade economy war",
        ]
        model, matrix = _lsa_over(texts, d=3)
        u, s, _ = dense_svd_oracle(matrix.toarray())
        oracle_embeddings = u[:, :3] * s[:3]
        for i in range(4):
            for j in range(4):
                expected = (1 + cosine(oracle_embeddings[i], oracle_embeddings[j])) / 2
                assert score_lsa(model, i, j) == pytest.approx(expected, abs=1e-9)


class TestComputeAtilpScores:
    def test_anchor_equal_to_source_abstract(self):
        texts = ["lincoln led the union", "economy of trade", "battles of the war"]
        model, _ = _lsa_over(texts)
        pair = CandidatePair(source=0, target=1, matched=((texts[0], (0, len(texts[0]))),))
        (triple,) = compute_atilp_scores(model, pair)
        assert triple[0] == pytest.approx(1.0, abs=1e-6)

    def test_all_oov_anchor(self):
        model, _ = _lsa_over(["alpha beta", "beta gamma", "gamma delta"])
        pair = CandidatePair(source=0, target=1, matched=(("zzz qqq", (0, 7)),))
        (triple,) = compute_atilp_scores(model, pair)
        assert triple[0] == 0.0
        assert triple[1] == 0.0

    def test_triples_match_dense_oracle(self):
        texts = ["war army battle", "army victory", "economy trade market"]
        model, matrix = _lsa_over(texts, d=2)
        u, s, vt = dense_svd_oracle(matrix.toarray())
        doc_vecs = u[:, :2] * s[:2]
        anchor = "army battle"
        pair = CandidatePair(source=0, target=2, matched=((anchor, (0, 11)),))
        (triple,) = compute_atilp_scores(model, pair)

        counts = {t: anchor.split().count(t) for t in set(anchor.split())}
        q = np.zeros(matrix.shape[1])
        _, vocab = build_tfidf([tokenize(t) for t in texts])
        idf = vocab.idf()
        for token, count in counts.items():
            q[vocab.index[token]] = count * idf[vocab.index[token]]
        anchor_vec = q @ vt[:2].T
        assert triple[0] == pytest.approx(cosine(anchor_vec, doc_vecs[0]), abs=1e-8)
        assert triple[1] == pytest.approx(cosine(anchor_vec, doc_vecs[2]), abs=1e-8)
        assert triple[2] == pytest.approx(cosine(doc_vecs[0], doc_vecs[2]), abs=1e-8)


class TestOlsFit:
    def test_recovers_reported_average_coefficients(self):
        # Noise-free targets built from the coefficients the full-scale
        # experiments average to; recovery must be exact to 1e-6.
        rng = np.random.default_rng(17)
        features = rng.uniform(-1, 1, size=(2000, 3))
        true_coef = np.array([0.10, 0.36, 1.06])
        targets = features @ true_coef
        coef, intercept = ols_fit(features, targets)
        assert np.allclose(coef, true_coef, atol=1e-6)
        assert abs(intercept) < 1e-6

    def test_ten_sample_fixture_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(18)
        features = rng.standard_normal((10, 3))
        targets = rng.standard_normal(10)
        design = np.hstack([features, np.ones((10, 1))])
        oracle = np.linalg.solve(design.T @ design, design.T @ targets)
        coef, intercept = ols_fit(features, targets)
        assert np.allclose(coef, oracle[:3], atol=1e-9)
        assert intercept == pytest.approx(oracle[3], abs=1e-9)

    def test_rank_deficient_design_minimum_norm(self):
        features = np.column_stack(
            [np.arange(6.0), np.arange(6.0) * 2, np.full(6, 0.5)]
        )
        targets = np.arange(6.0)
        coef, intercept = ols_fit(features, targets)
        prediction = features @ coef + intercept
        assert np.allclose(prediction, targets, atol=1e-9)
        assert np.all(np.isfinite(coef))


def _candidate_fixture():
    """Tiny corpus where anchors are document titles appearing verbatim."""
    texts = [
        "red apples grow on red trees",
        "apples and fruit baskets of the orchard",
        "blue rivers flow past blue stones",
        "rivers and stones shape the valley",
        "red apples near blue rivers sometimes",
    ]
    articles = [_article(i, t) for i, t in enumerate(texts)]
    net = DocumentNetwork.from_links(
        5,
        [
            (0, 1, "apples"),
            (4, 1, "apples"),
            (2, 3, "rivers"),
            (4, 3, "rivers"),
            (1, 0, "red apples"),
        ],
    )
    anchor_map = build_anchor_map(net)
    from wikilinks.anchors import build_eval_samples

    samples = build_eval_samples(net, anchor_map, articles)
    model, _ = _lsa_over(texts, d=3)
    return articles, net, anchor_map, samples, model


class TestFitScoreAtilp:
    def test_fit_and_score_in_unit_interval(self):
        _, net, _, samples, model = _candidate_fixture()
        atilp = fit_atilp(net, model, samples, seed=0)
        for pairs in samples.values():
            for pair in pairs:
                assert 0.0 <= score_atilp(atilp, pair) <= 1.0

    def test_shortfall_recorded(self):
        _, net, _, samples, model = _candidate_fixture()
        atilp = fit_atilp(net, model, samples, seed=0, n_positive=1000, n_negative=1000)
        total_pos = sum(1 for ps in samples.values() for p in ps if p.label)
        total_neg = sum(1 for ps in samples.values() for p in ps if not p.label)
        assert atilp.n_positive == total_pos < 1000
        assert atilp.n_negative == total_neg < 1000

    def test_fit_requires_both_labels(self):
        _, net, _, samples, model = _candidate_fixture()
        positives_only = {
            s: [p for p in ps if p.label] for s, ps in samples.items()
        }
        with pytest.raises(ValueError):
            fit_atilp(net, model, positives_only, seed=0)

    def test_constant_feature_does_not_crash(self):
        rng = np.random.default_rng(19)
        features = np.column_stack(
            [rng.standard_normal(50), rng.standard_normal(50), np.full(50, 0.7)]
        )
        targets = rng.integers(0, 2, size=50).astype(float)
        coef, intercept = ols_fit(features, targets)
        assert np.all(np.isfinite(coef)) and np.isfinite(intercept)

    def test_pure_s3_model_orders_like_lsa(self):
        _, net, _, samples, model = _candidate_fixture()
        from wikilinks.predictors import AtilpModel, score_lsa_vectors

        pure_s3 = AtilpModel(
            coefficients=np.array([0.0, 0.0, 1.0]), intercept=0.0, lsa=model
        )
        pairs = [p for ps in samples.values() for p in ps]
        atilp_scores = [score_atilp(pure_s3, p) for p in pairs]
        lsa_scores = [
            score_lsa_vectors(
                model.doc_embeddings[p.source], model.doc_embeddings[p.target]
            )
            for p in pairs
        ]
        # All fixture cosines are non-negative, so clamping keeps order.
        assert min(s for s in atilp_scores) >= 0.0
        order_a = sorted(range(len(pairs)), key=lambda i: (atilp_scores[i], i))
        order_l = sorted(range(len(pairs)), key=lambda i: (lsa_scores[i], i))
        assert order_a == order_l

    def test_max_over_anchors_and_clamp(self):
        texts = ["alpha beta gamma", "gamma delta", "epsilon zeta"]
        model, _ = _lsa_over(texts)
        from wikilinks.predictors import AtilpModel

        pair = CandidatePair(
            source=0, target=1, matched=(("alpha", (0, 5)), ("gamma", (11, 16)))
        )
        atilp = AtilpModel(
            coefficients=np.array([2.0, 2.0, 2.0]), intercept=0.5, lsa=model
        )
        triples = compute_atilp_scores(model, pair)
        raw = triples @ atilp.coefficients + atilp.intercept
        assert score_atilp(atilp, pair) == pytest.approx(min(1.0, max(0.0, raw.max())))
        assert score_atilp(atilp, pair) == 1.0  # clamped


class TestScoreRandom:
    def test_reproducible_sequence(self):
        a = [score_random(np.random.default_rng(123)) for _ in range(1)]
        b = [score_random(np.random.default_rng(123)) for _ in range(1)]
        assert a == b
        rng = np.random.default_rng(5)
        seq1 = [score_random(rng) for _ in range(10)]
        rng = np.random.default_rng(5)
        seq2 = [score_random(rng) for _ in range(10)]
        assert seq1 == seq2

    def test_mean_near_half(self):
        rng = np.random.default_rng(6)
        draws = rng.random(100_000)
        assert 0.495 <= draws.mean() <= 0.505

    def test_range(self):
        rng = np.random.default_rng(7)
        draws = [score_random(rng) for _ in range(1000)]
        assert all(0.0 <= d <= 1.0 for d in draws)


class TestExternalFileMethod:
    def test_matches_internal_method_emitting_same_scores(self, tmp_path, fixture_dataset):
        from wikilinks.dataset import write_predictions_tsv
        from wikilinks.evaluation import run_eval
        from conftest import BENCH_CONFIG

        def formula(s: int, t: int) -> float:
            return ((s * 31 + t * 17) % 97) / 96.0

        n = fixture_dataset.network.node_count
        write_predictions_tsv(
            tmp_path / "external.tsv",
            ((s, t, formula(s, t)) for s in range(n) for t in range(n) if s != t),
        )

        class FormulaMethod(Method):
            name = "formula"

            def make_scorer(self, ctx):
                return lambda pairs: np.array([formula(s, t) for s, t in pairs])

        external = ExternalFileMethod("external", tmp_path / "external.tsv")
        report = run_eval(
            fixture_dataset,
            [FormulaMethod(), external],
            runs=2,
            base_seed=0,
            config=BENCH_CONFIG,
        )
        for mode in ("inductive", "transductive"):
            internal = report.entry("formula", mode)
            from_file = report.entry("external", mode)
            assert internal.per_run == from_file.per_run

    def test_missing_pairs_score_zero(self, tmp_path):
        from wikilinks.dataset import write_predictions_tsv

        write_predictions_tsv(tmp_path / "p.tsv", [(0, 1, 0.25)])
        method = ExternalFileMethod("x", tmp_path / "p.tsv")
        scorer = method.make_scorer(None)
        assert scorer([(0, 1), (5, 6)]).tolist() == [0.25, 0.0]


class TestMakeMethod:
    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            make_method("nonsense")

    def test_builtins_resolve(self):
        for name in ("random", "at_title", "at_anchor", "lsa", "deepwalk", "atilp"):
            assert make_method(name).name == name


class TestAtilpTrainingRestriction:
    def test_target_restriction_excludes_hidden_documents(self):
        # The only negative candidate targets doc 2; restricting targets to
        # the retained docs {0, 1} must leave the fit without negatives.
        articles, net, _, samples, model = (None,) * 5
        texts = ["alpha beta", "alpha words here", "beta words there"]
        articles = [_article(i, t) for i, t in enumerate(texts)]
        net = DocumentNetwork.from_links(3, [(0, 1, "alpha"), (1, 2, "beta")])
        anchor_map = build_anchor_map(net)
        from wikilinks.anchors import build_eval_samples

        samples = build_eval_samples(net, anchor_map, articles)
        model, _ = _lsa_over(texts, d=2)
        # doc 0 contains "beta" but has no edge to 2: the sole negative.
        negatives = [p for ps in samples.values() for p in ps if not p.label]
        assert [(p.source, p.target) for p in negatives] == [(0, 2)]
        fit_atilp(net, model, samples, seed=0)  # unrestricted: fits fine
        with pytest.raises(ValueError):
            fit_atilp(net, model, samples, seed=0, targets=[0, 1])
