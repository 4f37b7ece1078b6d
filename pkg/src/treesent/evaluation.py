"""Metrics and matching rules: GLEU, bidirectional substring matching,
target precision/recall, sentiment accuracy, opinion-term and triplet
F1 (conditioned and corpus-level), and the report renderer."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from treesent.corpus import AlignmentError, GoldRecord
from treesent.extraction import HN, METHODS, SS, UNION, strip_function_words

OTE = "OTE"
FULL = "FULL"


class EvalInvariantError(Exception):
    """A structural ordering guarantee of the report was violated."""


@dataclass
class GleuScore:
    value: float
    precision: float
    recall: float
    matched: dict[int, int]
    candidate_counts: dict[int, int]
    reference_counts: dict[int, int]


def _ngram_counts(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def gleu(candidate: list[str], reference: list[str], max_n: int = 4) -> GleuScore:
    """min(precision, recall) over clipped n-gram matches pooled across
    n = 1..max_n. Empty candidate or reference scores 0."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    matched, cand_counts, ref_counts = {}, {}, {}
    for n in range(1, max_n + 1):
        c = _ngram_counts(candidate, n)
        r = _ngram_counts(reference, n)
        matched[n] = sum(min(count, r[gram]) for gram, count in c.items())
        cand_counts[n] = max(len(candidate) - n + 1, 0)
        ref_counts[n] = max(len(reference) - n + 1, 0)
    total_m = sum(matched.values())
    total_c = sum(cand_counts.values())
    total_r = sum(ref_counts.values())
    precision = total_m / total_c if total_c else 0.0
    recall = total_m / total_r if total_r else 0.0
    return GleuScore(value=min(precision, recall), precision=precision,
                     recall=recall, matched=matched,
                     candidate_counts=cand_counts, reference_counts=ref_counts)


def _is_sublist(needle, haystack):
    n = len(needle)
    return any(haystack[i:i + n] == needle for i in range(len(haystack) - n + 1))


def span_match(predicted: list[str], gold: list[str]) -> bool:
    """True iff one token sequence is a token-boundary substring of the
    other (case-insensitive). Empty sequences never match."""
    if not predicted or not gold:
        return False
    a = [t.lower() for t in predicted]
    b = [t.lower() for t in gold]
    return _is_sublist(a, b) if len(a) <= len(b) else _is_sublist(b, a)


@dataclass
class PredictedTarget:
    target_tokens: list[str]
    sentiment: str
    opinions: dict[str, list[str]] = field(default_factory=dict)  # method -> tokens
    span: tuple[int, int] | None = None


@dataclass
class SentencePrediction:
    tokens: list[str]
    targets: list[PredictedTarget] = field(default_factory=list)


@dataclass
class TargetMatch:
    sentence: int
    pred: PredictedTarget
    gold_span: tuple[int, ...]
    gold_triplets: list          # GoldTriplet list for that target


def _gold_target_spans(record: GoldRecord):
    """Unique gold target spans in order of first appearance."""
    seen = []
    for t in record.triplets:
        if t.target_span not in seen:
            seen.append(t.target_span)
    return seen


def match_targets(preds: list[SentencePrediction], gold: list[GoldRecord]
                  ) -> list[TargetMatch]:
    """Greedy one-to-one assignment of predicted to gold targets, in
    sentence order; each side is consumed at most once."""
    if len(preds) != len(gold):
        raise AlignmentError(
            f"{len(preds)} predicted sentences vs {len(gold)} gold records"
        )
    matches = []
    for s, (pred, record) in enumerate(zip(preds, gold)):
        spans = _gold_target_spans(record)
        taken = set()
        for target in pred.targets:
            for span in spans:
                if span in taken:
                    continue
                gold_tokens = [record.sentence_tokens[i] for i in span]
                if span_match(target.target_tokens, gold_tokens):
                    taken.add(span)
                    matches.append(TargetMatch(
                        sentence=s, pred=target, gold_span=span,
                        gold_triplets=[t for t in record.triplets
                                       if t.target_span == span]))
                    break
    return matches


@dataclass
class TargetEval:
    precision: float
    recall: float
    avg_gleu: float
    gleu_std: float
    n_predicted: int
    n_gold: int
    matches: list[TargetMatch]
    warnings: list[str] = field(default_factory=list)


def _mean_std(values):
    if not values:
        return 0.0, 0.0
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(var)


def evaluate_targets(preds: list[SentencePrediction], gold: list[GoldRecord]
                     ) -> TargetEval:
    """Target precision/recall plus average GLEU over matched pairs
    (determiners stripped on both sides before GLEU)."""
    matches = match_targets(preds, gold)
    n_pred = sum(len(p.targets) for p in preds)
    n_gold = sum(len(_gold_target_spans(g)) for g in gold)
    warnings = []
    if n_pred == 0:
        warnings.append("no predicted targets: precision reported as 0")
    if n_gold == 0:
        warnings.append("no gold targets: recall reported as 0")
    precision = len(matches) / n_pred if n_pred else 0.0
    recall = len(matches) / n_gold if n_gold else 0.0
    scores = []
    for m in matches:
        gold_tokens = [gold[m.sentence].sentence_tokens[i] for i in m.gold_span]
        scores.append(gleu(
            strip_function_words(m.pred.target_tokens, strip_copula=False),
            strip_function_words(gold_tokens, strip_copula=False),
        ).value)
    avg, std = _mean_std(scores)
    return TargetEval(precision=precision, recall=recall, avg_gleu=avg,
                      gleu_std=std, n_predicted=n_pred, n_gold=n_gold,
                      matches=matches, warnings=warnings)


@dataclass
class SentimentEval:
    accuracy: float
    n_matched: int
    warnings: list[str] = field(default_factory=list)


def evaluate_sentiment(preds: list[SentencePrediction], gold: list[GoldRecord],
                       matches: list[TargetMatch] | None = None) -> SentimentEval:
    """Accuracy over matched targets only."""
    if matches is None:
        matches = match_targets(preds, gold)
    if not matches:
        return SentimentEval(accuracy=0.0, n_matched=0,
                             warnings=["no matched targets: accuracy reported as 0"])
    correct = sum(
        any(t.sentiment == m.pred.sentiment for t in m.gold_triplets)
        for m in matches
    )
    return SentimentEval(accuracy=correct / len(matches), n_matched=len(matches))


@dataclass
class TripletEval:
    precision: float
    recall: float
    f1: float
    n_correct: int
    n_predicted: int
    n_gold: int
    warnings: list[str] = field(default_factory=list)


def _f1(p, r):
    return 2 * p * r / (p + r) if (p + r) else 0.0


def _opinion_correct(pred_opinion, record, triplet):
    gold_opinion = [record.sentence_tokens[i] for i in triplet.opinion_span]
    return span_match(pred_opinion, gold_opinion)


def evaluate_triplets(preds: list[SentencePrediction], gold: list[GoldRecord],
                      method: str, stage: str = FULL,
                      conditioning: str = "corpus",
                      matches: list[TargetMatch] | None = None) -> TripletEval:
    """Triplet scoring for one extraction method.

    ``conditioning="conditioned"`` scores only the correctly matched
    targets (one prediction per target, so P = R = F1); ``"corpus"``
    scores every predicted triplet against every gold triplet with
    greedy one-to-one assignment. Stage ``OTE`` requires the opinion
    term to match; ``FULL`` additionally requires the exact sentiment.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if stage not in (OTE, FULL):
        raise ValueError(f"unknown stage {stage!r}")
    if conditioning == "conditioned":
        if matches is None:
            matches = match_targets(preds, gold)
        if not matches:
            return TripletEval(0.0, 0.0, 0.0, 0, 0, 0,
                               warnings=["no matched targets"])
        correct = 0
        for m in matches:
            record = gold[m.sentence]
            opinion = m.pred.opinions.get(method, [])
            for t in m.gold_triplets:
                if stage == FULL and t.sentiment != m.pred.sentiment:
                    continue
                if _opinion_correct(opinion, record, t):
                    correct += 1
                    break
        rate = correct / len(matches)
        return TripletEval(precision=rate, recall=rate, f1=rate,
                           n_correct=correct, n_predicted=len(matches),
                           n_gold=len(matches))
    if conditioning != "corpus":
        raise ValueError(f"unknown conditioning {conditioning!r}")
    if len(preds) != len(gold):
        raise AlignmentError(
            f"{len(preds)} predicted sentences vs {len(gold)} gold records"
        )
    n_predicted = sum(len(p.targets) for p in preds)
    n_gold = sum(len(g.triplets) for g in gold)
    correct = 0
    for pred, record in zip(preds, gold):
        taken = set()
        for target in pred.targets:
            opinion = target.opinions.get(method, [])
            for gi, t in enumerate(record.triplets):
                if gi in taken:
                    continue
                gold_target = [record.sentence_tokens[i] for i in t.target_span]
                if not span_match(target.target_tokens, gold_target):
                    continue
                if stage == FULL and t.sentiment != target.sentiment:
                    continue
                if not _opinion_correct(opinion, record, t):
                    continue
                taken.add(gi)
                correct += 1
                break
    precision = correct / n_predicted if n_predicted else 0.0
    recall = correct / n_gold if n_gold else 0.0
    warnings = []
    if n_predicted == 0:
        warnings.append("no predicted triplets: precision reported as 0")
    if n_gold == 0:
        warnings.append("no gold triplets: recall reported as 0")
    return TripletEval(precision=precision, recall=recall,
                       f1=_f1(precision, recall), n_correct=correct,
                       n_predicted=n_predicted, n_gold=n_gold,
                       warnings=warnings)


def opinion_gleu(preds: list[SentencePrediction], gold: list[GoldRecord],
                 method: str, matches: list[TargetMatch] | None = None
                 ) -> tuple[float, float]:
    """Average GLEU (and sigma) between extracted and gold opinion terms
    over matched targets with a non-empty extraction. Copulas and
    determiners are stripped for SS/UNION extractions, whose multi-word
    spans routinely pick them up."""
    if matches is None:
        matches = match_targets(preds, gold)
    strip = method in (SS, UNION)
    scores = []
    for m in matches:
        opinion = m.pred.opinions.get(method, [])
        if strip:
            opinion = strip_function_words(opinion)
        if not opinion:
            continue
        record = gold[m.sentence]
        best = 0.0
        for t in m.gold_triplets:
            gold_opinion = [record.sentence_tokens[i] for i in t.opinion_span]
            if strip:
                gold_opinion = strip_function_words(gold_opinion)
            best = max(best, gleu(opinion, gold_opinion).value)
        scores.append(best)
    return _mean_std(scores)


def full_sentence_gleu(gold: list[GoldRecord]) -> tuple[float, float]:
    """Baseline row: GLEU of the whole sentence against each gold opinion."""
    scores = []
    for record in gold:
        for t in record.triplets:
            gold_opinion = [record.sentence_tokens[i] for i in t.opinion_span]
            scores.append(gleu(record.sentence_tokens, gold_opinion).value)
    return _mean_std(scores)


@dataclass
class MethodScores:
    ote_f1: float                 # conditioned opinion-term score
    triplet3_f1: float            # conditioned full-triplet ("-3") score
    corpus_precision: float
    corpus_recall: float
    corpus_f1: float
    opinion_gleu_avg: float
    opinion_gleu_std: float


@dataclass
class EvalReport:
    dataset_id: str
    n_sentences: int
    n_gold_targets: int
    n_predicted_targets: int
    target_precision: float
    target_recall: float
    target_avg_gleu: float
    target_gleu_std: float
    sentiment_accuracy: float
    full_sent_gleu_avg: float
    full_sent_gleu_std: float
    methods: dict[str, MethodScores]
    warnings: list[str] = field(default_factory=list)


def _check_report_invariants(report: EvalReport):
    tol = 1e-12
    for name, scores in report.methods.items():
        if scores.triplet3_f1 > scores.ote_f1 + tol:
            raise EvalInvariantError(
                f"{name}: full-triplet F1 {scores.triplet3_f1:.4f} exceeds "
                f"opinion-term F1 {scores.ote_f1:.4f}"
            )
    if UNION in report.methods and HN in report.methods and SS in report.methods:
        union_r = report.methods[UNION].corpus_recall
        best = max(report.methods[HN].corpus_recall,
                   report.methods[SS].corpus_recall)
        if union_r + tol < best:
            raise EvalInvariantError(
                f"UNION corpus recall {union_r:.4f} below max(HN, SS) {best:.4f}"
            )


def evaluate_all(preds: list[SentencePrediction], gold: list[GoldRecord],
                 dataset_id: str = "dataset",
                 methods: tuple[str, ...] = METHODS) -> EvalReport:
    """Produce the full report (every table analogue) in one pass."""
    target_eval = evaluate_targets(preds, gold)
    matches = target_eval.matches
    sent_eval = evaluate_sentiment(preds, gold, matches=matches)
    per_method = {}
    warnings = list(target_eval.warnings) + list(sent_eval.warnings)
    for method in methods:
        ote = evaluate_triplets(preds, gold, method, stage=OTE,
                                conditioning="conditioned", matches=matches)
        full = evaluate_triplets(preds, gold, method, stage=FULL,
                                 conditioning="conditioned", matches=matches)
        corpus = evaluate_triplets(preds, gold, method, stage=FULL,
                                   conditioning="corpus")
        g_avg, g_std = opinion_gleu(preds, gold, method, matches=matches)
        warnings.extend(f"{method}: {w}" for w in ote.warnings + corpus.warnings)
        per_method[method] = MethodScores(
            ote_f1=ote.f1, triplet3_f1=full.f1,
            corpus_precision=corpus.precision, corpus_recall=corpus.recall,
            corpus_f1=corpus.f1,
            opinion_gleu_avg=g_avg, opinion_gleu_std=g_std,
        )
    fs_avg, fs_std = full_sentence_gleu(gold)
    report = EvalReport(
        dataset_id=dataset_id,
        n_sentences=len(gold),
        n_gold_targets=target_eval.n_gold,
        n_predicted_targets=target_eval.n_predicted,
        target_precision=target_eval.precision,
        target_recall=target_eval.recall,
        target_avg_gleu=target_eval.avg_gleu,
        target_gleu_std=target_eval.gleu_std,
        sentiment_accuracy=sent_eval.accuracy,
        full_sent_gleu_avg=fs_avg,
        full_sent_gleu_std=fs_std,
        methods=per_method,
        warnings=sorted(set(warnings)),
    )
    _check_report_invariants(report)
    return report


def render_report(report: EvalReport) -> tuple[str, list[str]]:
    """Deterministic text tables plus line-delimited machine records."""
    lines = [f"== evaluation: {report.dataset_id} "
             f"({report.n_sentences} sentences) =="]
    lines.append("")
    lines.append("-- targets --")
    lines.append("gold_targets\tP\tR\tavg_GLEU\tGLEU_sigma")
    lines.append(f"{report.n_gold_targets}\t{report.target_precision:.3f}"
                 f"\t{report.target_recall:.3f}\t{report.target_avg_gleu:.3f}"
                 f"\t{report.target_gleu_std:.3f}")
    lines.append("")
    lines.append("-- sentiment --")
    lines.append(f"accuracy\t{report.sentiment_accuracy:.3f}")
    lines.append("")
    lines.append("-- opinion terms (conditioned on matched targets) --")
    lines.append("method\tOTE_F1\ttriplet3_F1")
    for name in sorted(report.methods):
        s = report.methods[name]
        lines.append(f"{name}\t{s.ote_f1:.3f}\t{s.triplet3_f1:.3f}")
    lines.append("")
    lines.append("-- opinion GLEU --")
    lines.append("method\tavg_GLEU\tsigma")
    lines.append(f"FULL_SENT\t{report.full_sent_gleu_avg:.3f}"
                 f"\t{report.full_sent_gleu_std:.3f}")
    for name in sorted(report.methods):
        s = report.methods[name]
        lines.append(f"{name}\t{s.opinion_gleu_avg:.3f}\t{s.opinion_gleu_std:.3f}")
    lines.append("")
    lines.append("-- triplets (corpus-level) --")
    lines.append("method\tP\tR\tF1")
    for name in sorted(report.methods):
        s = report.methods[name]
        lines.append(f"{name}\t{s.corpus_precision:.3f}\t{s.corpus_recall:.3f}"
                     f"\t{s.corpus_f1:.3f}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    text = "\n".join(lines) + "\n"

    records = []
    base = {"dataset": report.dataset_id, "sentences": report.n_sentences}
    records.append(json.dumps({**base, "table": "targets",
                               "gold_targets": report.n_gold_targets,
                               "predicted_targets": report.n_predicted_targets,
                               "precision": report.target_precision,
                               "recall": report.target_recall,
                               "avg_gleu": report.target_avg_gleu,
                               "gleu_std": report.target_gleu_std},
                              sort_keys=True))
    records.append(json.dumps({**base, "table": "sentiment",
                               "accuracy": report.sentiment_accuracy},
                              sort_keys=True))
    for name in sorted(report.methods):
        s = report.methods[name]
        records.append(json.dumps({**base, "table": "method", "method": name,
                                   "ote_f1": s.ote_f1,
                                   "triplet3_f1": s.triplet3_f1,
                                   "corpus_precision": s.corpus_precision,
                                   "corpus_recall": s.corpus_recall,
                                   "corpus_f1": s.corpus_f1,
                                   "opinion_gleu_avg": s.opinion_gleu_avg,
                                   "opinion_gleu_std": s.opinion_gleu_std},
                                  sort_keys=True))
    records.append(json.dumps({**base, "table": "full_sent_gleu",
                               "avg": report.full_sent_gleu_avg,
                               "std": report.full_sent_gleu_std},
                              sort_keys=True))
    if report.warnings:
        records.append(json.dumps({**base, "table": "warnings",
                                   "warnings": report.warnings}, sort_keys=True))
    return text, records
