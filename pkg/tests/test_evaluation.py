import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treesent.corpus import AlignmentError, GoldRecord, GoldTriplet
from treesent.evaluation import (
    FULL,
    OTE,
    EvalInvariantError,
    EvalReport,
    MethodScores,
    PredictedTarget,
    SentencePrediction,
    evaluate_all,
    evaluate_sentiment,
    evaluate_targets,
    evaluate_triplets,
    gleu,
    render_report,
    span_match,
)

tokens_strategy = st.lists(
    st.sampled_from([f"w{i}" for i in range(5)]), min_size=0, max_size=10)


class TestGleu:
    def test_identity(self):
        assert gleu(["pretty", "good"], ["pretty", "good"]).value == 1.0

    def test_hand_counted_third(self):
        # candidate "good": 1 unigram; reference "pretty good": 2 unigrams
        # + 1 bigram = 3; matches = 1 -> min(1/1, 1/3)
        score = gleu(["good"], ["pretty", "good"])
        assert score.value == pytest.approx(1 / 3)

    def test_disjoint(self):
        assert gleu(["a", "b"], ["c", "d"]).value == 0.0

    def test_empty_sides(self):
        assert gleu([], ["a"]).value == 0.0
        assert gleu(["a"], []).value == 0.0

    @given(tokens_strategy, tokens_strategy)
    @settings(max_examples=200)
    def test_symmetry(self, a, b):
        assert gleu(a, b).value == pytest.approx(gleu(b, a).value)

    @given(tokens_strategy.filter(bool))
    def test_self_score_is_one(self, a):
        assert gleu(a, a).value == 1.0


class TestSpanMatch:
    def test_truth_table(self):
        cases = [
            (["red", "cake"], ["the", "red", "cake"], True),
            (["cake"], ["the", "red", "cake"], True),
            (["pancake"], ["cake"], False),          # token-boundary rule
            (["the", "red", "cake"], ["cake"], True),
            (["Red", "Cake"], ["red", "cake"], True),  # case-insensitive
            ([], ["cake"], False),
            (["cake"], [], False),
            (["red", "cake"], ["cake", "red"], False),
        ]
        for pred, gold, expected in cases:
            assert span_match(pred, gold) is expected, (pred, gold)

    @given(tokens_strategy, tokens_strategy)
    @settings(max_examples=200)
    def test_symmetric(self, a, b):
        assert span_match(a, b) == span_match(b, a)

    @given(tokens_strategy.filter(bool))
    def test_reflexive(self, a):
        assert span_match(a, a)


def simple_gold(tokens, triplets):
    return GoldRecord(tokens, [
        GoldTriplet(tuple(t), tuple(o), s) for t, o, s in triplets])


def simple_pred(tokens, targets):
    preds = []
    for target_tokens, sentiment, opinions in targets:
        preds.append(PredictedTarget(target_tokens=target_tokens,
                                     sentiment=sentiment, opinions=opinions))
    return SentencePrediction(tokens=tokens, targets=preds)


class TestEvaluateTargets:
    def test_perfect(self):
        gold = [simple_gold(["food", "rocks"], [([0], [1], "positive")])]
        preds = [simple_pred(["food", "rocks"],
                             [(["food"], "positive", {"HN": ["rocks"]})])]
        result = evaluate_targets(preds, gold)
        assert result.precision == 1.0
        assert result.recall == 1.0
        assert result.avg_gleu == 1.0

    def test_zero_predictions(self):
        gold = [simple_gold(["food", "rocks"], [([0], [1], "positive")])]
        preds = [SentencePrediction(tokens=["food", "rocks"])]
        result = evaluate_targets(preds, gold)
        assert result.precision == 0.0
        assert result.recall == 0.0
        assert any("precision" in w for w in result.warnings)

    def test_alignment_error(self):
        gold = [simple_gold(["a"], [])]
        with pytest.raises(AlignmentError):
            evaluate_targets([], gold)

    def test_greedy_one_to_one(self):
        # two identical predictions cannot both claim the single gold target
        gold = [simple_gold(["food"], [([0], [0], "positive")])]
        preds = [simple_pred(["food"], [(["food"], "positive", {}),
                                        (["food"], "positive", {})])]
        result = evaluate_targets(preds, gold)
        assert result.precision == 0.5
        assert result.recall == 1.0


class TestEvaluateSentiment:
    def test_all_correct(self):
        gold = [simple_gold(["food", "rocks"], [([0], [1], "positive")])]
        preds = [simple_pred(["food", "rocks"], [(["food"], "positive", {})])]
        assert evaluate_sentiment(preds, gold).accuracy == 1.0

    def test_all_wrong(self):
        gold = [simple_gold(["food", "rocks"], [([0], [1], "positive")])]
        preds = [simple_pred(["food", "rocks"], [(["food"], "negative", {})])]
        assert evaluate_sentiment(preds, gold).accuracy == 0.0

    def test_no_matches_warns(self):
        gold = [simple_gold(["food"], [([0], [0], "positive")])]
        preds = [SentencePrediction(tokens=["food"])]
        result = evaluate_sentiment(preds, gold)
        assert result.accuracy == 0.0
        assert result.warnings


class TestEvaluateTriplets:
    def test_single_perfect_both_stages(self):
        gold = [simple_gold(["food", "rocks"], [([0], [1], "positive")])]
        preds = [simple_pred(["food", "rocks"],
                             [(["food"], "positive", {"HN": ["rocks"]})])]
        for stage in (OTE, FULL):
            for conditioning in ("conditioned", "corpus"):
                r = evaluate_triplets(preds, gold, "HN", stage=stage,
                                      conditioning=conditioning)
                assert r.precision == r.recall == r.f1 == 1.0

    def test_conditioned_p_equals_r_equals_f1(self):
        gold = [simple_gold(["food", "is", "bad"],
                            [([0], [2], "negative")])]
        preds = [simple_pred(["food", "is", "bad"],
                             [(["food"], "positive", {"HN": ["is"]})])]
        r = evaluate_triplets(preds, gold, "HN", stage=FULL,
                              conditioning="conditioned")
        assert r.precision == r.recall == r.f1 == 0.0

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="method"):
            evaluate_triplets([], [], "XX")


class TestReport:
    def make_report(self):
        gold = [simple_gold(["food", "rocks"], [([0], [1], "positive")]),
                simple_gold(["bad", "service"], [([1], [0], "negative")])]
        preds = [
            simple_pred(["food", "rocks"],
                        [(["food"], "positive",
                          {"HN": ["rocks"], "SS": ["rocks"], "UNION": ["rocks"]})]),
            simple_pred(["bad", "service"],
                        [(["service"], "negative",
                          {"HN": ["bad"], "SS": [], "UNION": ["bad"]})]),
        ]
        return evaluate_all(preds, gold, dataset_id="fixture")

    def test_render_deterministic(self):
        report = self.make_report()
        a_text, a_records = render_report(report)
        b_text, b_records = render_report(report)
        assert a_text == b_text
        assert a_records == b_records
        assert "fixture" in a_text

    def test_empty_dataset_warns(self):
        report = evaluate_all([], [], dataset_id="empty")
        assert report.warnings
        text, _ = render_report(report)
        assert "warning" in text

    def test_invariant_violation_raises(self):
        report = self.make_report()
        report.methods["HN"].triplet3_f1 = report.methods["HN"].ote_f1 + 0.5
        from treesent.evaluation import _check_report_invariants
        with pytest.raises(EvalInvariantError):
            _check_report_invariants(report)

    def test_union_recall_invariant_raises(self):
        report = self.make_report()
        report.methods["UNION"].corpus_recall = 0.0
        report.methods["HN"].corpus_recall = 1.0
        from treesent.evaluation import _check_report_invariants
        with pytest.raises(EvalInvariantError, match="UNION"):
            _check_report_invariants(report)
