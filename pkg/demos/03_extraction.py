"""The symbolic layer: from node sentiment scores to triplets.

The neural model's only job is a 3-class log-probability vector per
tree node. Everything else is rules: noun chunks become candidate
targets, each target takes the sentiment predicted at its nearest
verb/auxiliary ancestor, and two searches of that verb's subtree
propose the opinion term — HN picks the single highest-scoring node
for the target's sentiment class, SS keeps every node whose argmax
class agrees. Here the scores are fabricated so each step is legible.

Run: python demos/03_extraction.py
"""

import os
import tempfile

import numpy as np

from corpusprep import HeuristicBackend, format_conllu_block
from treesent import (NodePrediction, extract_triplets, identify_targets,
                      noun_chunks, read_conllu, recursive_search)
from treesent.extraction import HN, SS, UNION
from treesent.labels import LABELS

SENTENCE = "The food is pretty good"

# the corpus-prep backend supplies the dependency tree + chunk marks
parsed = HeuristicBackend().parse(SENTENCE)
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "demo.conllu")
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_conllu_block(parsed) + "\n")
    tree = read_conllu(path)[0]

print(f"sentence: {SENTENCE}")
for tok in tree.tokens:
    head = "root" if tok.head < 0 else tree.tokens[tok.head].surface
    print(f"  {tok.surface:>7} {tok.upos:>5} --{tok.deprel}--> {head}")

chunks = noun_chunks(tree)
print(f"\nnoun chunks: {[ ' '.join(tree.surfaces()[a:b]) for a, b in chunks ]}")

targets = identify_targets(tree, chunks)
surfaces = tree.surfaces()
for cand in targets:
    verb = (tree.tokens[cand.parent_verb_index].surface
            if cand.parent_verb_index is not None else "(none)")
    phrase = " ".join(surfaces[cand.chunk[0]:cand.chunk[1]])
    print(f"target {phrase!r} -> parental verb {verb!r}")


def scores(neg, neu, pos):
    return NodePrediction(np.log(np.array([neg, neu, pos], dtype=float)))


# fabricated per-node distributions: "good" is strongly positive, and
# the adverb-adjective phrase even more so at the adjective node
preds = {
    0: scores(.2, .6, .2),   # The
    1: scores(.2, .6, .2),   # food
    2: scores(.1, .3, .6),   # is      (root: carries the target sentiment)
    3: scores(.2, .3, .5),   # pretty
    4: scores(.05, .1, .85),  # good
}

cand = targets[0]
print(f"\ntrickled-down sentiment at the verb: "
      f"{LABELS[preds[cand.parent_verb_index].argmax_index]}")

result = recursive_search(tree, preds, cand.parent_verb_index,
                          "positive", exclusion=cand.chunk)
print(f"{HN}: {surfaces[result.hn_token_index]!r}")
print(f"{SS}: {' '.join(surfaces[i] for i in result.ss_token_indices)!r}")

print("\nfull pipeline output:")
for method in (HN, SS, UNION):
    for triplet in extract_triplets(tree, preds, method=method):
        print(f"  {method:>5}: ({' '.join(triplet.target_tokens)!r}, "
              f"{triplet.sentiment}, {' '.join(triplet.opinion_tokens)!r})")
