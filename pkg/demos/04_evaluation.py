"""The evaluation harness: GLEU, span matching, and the report.

Scores a tiny prediction set against gold triplets and renders the
full report: target identification P/R with match-quality GLEU,
sentiment accuracy over matched targets, and per-method triplet
P/R/F1 at both the target-only and full-triplet stages.

Run: python demos/04_evaluation.py
"""

from treesent import GoldRecord, GoldTriplet, evaluate_all, gleu, render_report, span_match
from treesent.evaluation import PredictedTarget, SentencePrediction

print("GLEU is min(precision, recall) over pooled 1-4-gram matches:")
for cand, ref in [("good", "good"),
                  ("very good", "good"),
                  ("was great", "the pasta was great")]:
    score = gleu(cand.split(), ref.split())
    print(f"  gleu({cand!r}, {ref!r}) = {score.value:.4f}")

print("\nspan_match is token-boundary containment, either direction:")
for cand, ref in [("red cake", "the red cake"), ("red", "shred"),
                  ("the red cake", "red cake")]:
    print(f"  span_match({cand!r}, {ref!r}) = "
          f"{span_match(cand.split(), ref.split())}")

# two sentences: one clean hit, one partial (wrong opinion under HN)
gold = [
    GoldRecord(["the", "food", "was", "excellent"],
               [GoldTriplet(target_span=(1,), opinion_span=(3,),
                            sentiment="positive")]),
    GoldRecord(["service", "was", "slow", "and", "rude"],
               [GoldTriplet(target_span=(0,), opinion_span=(2,),
                            sentiment="negative")]),
]
preds = [
    SentencePrediction(
        tokens=gold[0].sentence_tokens,
        targets=[PredictedTarget(target_tokens=["the", "food"],
                                 sentiment="positive", span=(0, 2),
                                 opinions={"HN": ["excellent"],
                                           "SS": ["was", "excellent"],
                                           "UNION": ["was", "excellent"]})]),
    SentencePrediction(
        tokens=gold[1].sentence_tokens,
        targets=[PredictedTarget(target_tokens=["service"],
                                 sentiment="negative", span=(0, 1),
                                 opinions={"HN": ["rude"],
                                           "SS": ["slow", "rude"],
                                           "UNION": ["slow", "rude"]})]),
]

report = evaluate_all(preds, gold, dataset_id="demo")
text, jsonl = render_report(report)
print("\n" + text)
print("machine-readable rows:")
for row in jsonl[:3]:
    print(" ", row)
print(f"  ... ({len(jsonl)} rows total)")
