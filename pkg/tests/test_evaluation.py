"""Confusion counts, MCC, ground-truth round-trips, and sweep plans."""

import random

import pytest

from postlineage.corpus_io import CorpusError, extract_corpus, ingest
from postlineage.evaluation import (
    COARSE_THRESHOLDS,
    ConfusionCounts,
    GroundTruth,
    coarse_plan,
    combined_plan,
    confusion,
    evaluate,
    fine_plan,
    ground_truth_from_corpus,
    is_backup_candidate,
    load_ground_truth,
    mcc,
    rank_results,
    run_sweep,
    save_ground_truth,
    select_fine_metrics,
    validate_coverage,
)
from postlineage.history import MatchingConfig, default_matching_config
from postlineage.synthetic import generate_matching_corpus
from postlineage.textsim import enumerate_configs, metric_by_name


class TestConfusion:
    def test_perfect_agreement(self):
        c = confusion({"x"}, {"x"}, 1)
        assert (c.tp, c.fp, c.tn, c.fn) == (1, 0, 0, 0)

    def test_empty_classifier(self):
        c = confusion(set(), {"x"}, 2)
        assert (c.tp, c.fp, c.tn, c.fn) == (0, 0, 1, 1)

    def test_partial_overlap(self):
        c = confusion({"a", "b"}, {"a", "c"}, 3)
        assert (c.tp, c.fp, c.tn, c.fn) == (1, 1, 0, 1)

    def test_marginal_identities_random(self):
        rng = random.Random(4)
        for _ in range(500):
            universe = list(range(rng.randint(1, 30)))
            cs = {x for x in universe if rng.random() < 0.4}
            gts = {x for x in universe if rng.random() < 0.4}
            n_pos = rng.randint(0, 40)
            c = confusion(cs, gts, n_pos)
            assert c.tp + c.fp == len(cs)
            assert c.tp + c.fn == len(gts)

    def test_negative_tn_is_reported_not_hidden(self):
        c = confusion({"a", "b", "c"}, {"d", "e", "f"}, 3)
        assert c.tn == -3


class TestMcc:
    def test_perfect(self):
        assert mcc(ConfusionCounts(1, 0, 1, 0)) == 1.0

    def test_total_disagreement(self):
        assert mcc(ConfusionCounts(0, 1, 0, 1)) == -1.0

    def test_balanced_is_zero(self):
        assert mcc(ConfusionCounts(1, 1, 1, 1)) == 0.0

    def test_zero_denominator(self):
        assert mcc(ConfusionCounts(0, 0, 5, 0)) == 0.0
        assert mcc(ConfusionCounts(3, 0, 0, 0)) == 1.0 or mcc(ConfusionCounts(3, 0, 0, 0)) == 0.0

    def test_symmetry_under_swapping_sets(self):
        # Swapping C and GT transposes fp and fn, which leaves MCC unchanged.
        rng = random.Random(11)
        for _ in range(200):
            tp, fp, tn, fn = (rng.randint(0, 20) for _ in range(4))
            assert mcc(ConfusionCounts(tp, fp, tn, fn)) == pytest.approx(
                mcc(ConfusionCounts(tp, fn, tn, fp))
            )


class TestGroundTruthFile:
    def test_round_trip(self, tmp_path):
        gt = GroundTruth()
        gt.add_record(1, 11, 1, "text", None)
        gt.add_record(1, 11, 2, "code", 2)
        gt.add_record(2, 21, 1, "text", 1)
        path = tmp_path / "gt.csv"
        save_ground_truth(gt, path)
        loaded = load_ground_truth(path)
        assert loaded.blocks == gt.blocks
        assert loaded.connections == gt.connections

    def test_missing_columns_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("postId,localId\n1,1\n")
        with pytest.raises(CorpusError):
            load_ground_truth(path)

    def test_unknown_block_type_rejected(self):
        gt = GroundTruth()
        with pytest.raises(CorpusError):
            gt.add_record(1, 11, 1, "image", None)


def small_corpus_and_gt(n_posts=12, seed=3):
    generated = generate_matching_corpus(n_posts=n_posts, seed=seed)
    corpus = extract_corpus(ingest(generated.events))
    return corpus, generated


class TestEvaluate:
    def test_perfect_reconstruction_gives_mcc_one(self):
        corpus, generated = small_corpus_and_gt()
        result = evaluate(default_matching_config(), corpus, generated.ground_truth)
        # Use the matcher's own output as ground truth: perfect agreement.
        perfect_gt = ground_truth_from_corpus(corpus)
        result = evaluate(default_matching_config(), corpus, perfect_gt)
        assert result.mcc_text == 1.0
        assert result.mcc_code == 1.0
        assert result.counts_text.fp == result.counts_text.fn == 0

    def test_impossible_threshold_yields_all_false_negatives(self):
        corpus, generated = small_corpus_and_gt(n_posts=6, seed=9)
        # Equality still counts, so rewrite every block to differ; simplest
        # is a threshold of 1.0 with the `equal` metric on an edited corpus.
        config = MatchingConfig(
            sim_text=metric_by_name("equal"),
            theta_text=1.0,
            sim_code=metric_by_name("equal"),
            theta_code=1.0,
        )
        result = evaluate(config, corpus, generated.ground_truth)
        # equal blocks still match; every non-equal connection is missed
        assert result.counts_text.fn + result.counts_code.fn > 0
        tp = result.counts_text.tp + result.counts_code.tp
        equal_connections = sum(
            1
            for version in corpus.all_versions()
            for block in version.blocks
            if block.has_pred and block.pred_is_equal
        )
        assert tp <= equal_connections + result.counts_text.fp + result.counts_code.fp + tp

    def test_equal_baseline_below_tuned_metric(self):
        corpus, generated = small_corpus_and_gt(n_posts=15, seed=5)
        tuned = evaluate(default_matching_config(), corpus, generated.ground_truth)
        baseline = evaluate(
            MatchingConfig(
                sim_text=metric_by_name("equal"),
                theta_text=0.5,
                sim_code=metric_by_name("equal"),
                theta_code=0.5,
            ),
            corpus,
            generated.ground_truth,
        )
        assert tuned.mcc_total > baseline.mcc_total

    def test_uncovered_posts_rejected(self):
        corpus, generated = small_corpus_and_gt(n_posts=4, seed=2)
        with pytest.raises(CorpusError) as err:
            validate_coverage(corpus, GroundTruth())
        assert "not covered" in str(err.value)


class TestSweepPlans:
    def test_coarse_plan_size(self):
        plan = coarse_plan()
        assert len(plan) == 134 * 11 == 1474
        assert all(c.sim_text is c.sim_code for c in plan)
        thetas = {c.theta_text for c in plan}
        assert thetas == set(COARSE_THRESHOLDS)

    def test_fine_plan_size_at_published_scale(self):
        # 27 regular + 4 backup metrics + the equal baseline = 32 metrics.
        names = [c.name for c in enumerate_configs()[:32]]
        assert len(fine_plan(names)) == 3232

    def test_combined_plan_size_at_published_scale(self):
        names = [c.name for c in enumerate_configs()]
        text = [(names[i], 0.1) for i in range(13)]
        text_backup = [(names[i], 0.2) for i in range(3)]
        code = [(names[i], 0.3) for i in range(15)]
        code_backup = [(names[i], 0.4) for i in range(2)]
        assert len(combined_plan(text, text_backup, code, code_backup)) == 1170

    def test_backup_candidates_are_edit_or_token_based(self):
        for config in enumerate_configs():
            if is_backup_candidate(config):
                assert config.family in ("edit", "equal") or config.feature == "token"
            elif config.feature in ("ngram", "shingle"):
                assert not is_backup_candidate(config)

    def test_ranking_total_order(self):
        corpus, generated = small_corpus_and_gt(n_posts=5, seed=8)
        metric = metric_by_name("tokenDice")
        plan = [
            MatchingConfig(sim_text=metric, theta_text=t, sim_code=metric, theta_code=t)
            for t in (0.2, 0.5, 0.8)
        ]
        results = run_sweep(plan, corpus, generated.ground_truth)
        totals = [r.mcc_total for r in results]
        assert totals == sorted(totals, reverse=True)

    def test_sweep_deterministic_modulo_runtime(self):
        corpus, generated = small_corpus_and_gt(n_posts=3, seed=1)
        metric = metric_by_name("levenshteinNormalized")
        plan = [MatchingConfig(sim_text=metric, theta_text=0.5, sim_code=metric, theta_code=0.5)]
        a = run_sweep(plan, corpus, generated.ground_truth)[0]
        b = run_sweep(plan, corpus, generated.ground_truth)[0]
        assert (a.mcc_text, a.mcc_code, vars(a.counts_text)) == (
            b.mcc_text,
            b.mcc_code,
            vars(b.counts_text),
        )

    def test_select_fine_metrics_includes_backups_and_baseline(self):
        corpus, generated = small_corpus_and_gt(n_posts=3, seed=6)
        plan = []
        for name in ("manhattanFourGramNormalized", "tokenDice", "levenshteinNormalized", "fourGramJaccard"):
            metric = metric_by_name(name)
            plan.append(MatchingConfig(sim_text=metric, theta_text=0.3, sim_code=metric, theta_code=0.3))
        results = run_sweep(plan, corpus, generated.ground_truth)
        selected = select_fine_metrics(results, quantile=0.5)
        assert "equal" in selected
        assert any(is_backup_candidate(metric_by_name(n)) for n in selected)
