"""Synthetic 3-class sentiment corpus in the toks/parents/labels shape.

Used by the training-sanity acceptance check when no real treebank
directory is supplied: sentences are random trees over a lexicon whose
class words determine the root label, so the task is learnable from
root supervision alone.
"""

import numpy as np

from treesent.corpus import EmbeddingTable, SstExample
from treesent.nncore import make_rng

POS_WORDS = [f"pos{i}" for i in range(10)]
NEG_WORDS = [f"neg{i}" for i in range(10)]
NEU_WORDS = [f"neu{i}" for i in range(30)]
VOCAB = POS_WORDS + NEG_WORDS + NEU_WORDS


def synthetic_embeddings(dim=12, seed=1234):
    rng = make_rng(seed)
    return EmbeddingTable(dim=dim, entries={w: rng.normal(size=dim) for w in VOCAB})


def synthetic_example(rng) -> SstExample:
    label = int(rng.integers(0, 3))
    n = int(rng.integers(3, 9))
    tokens = [str(rng.choice(NEU_WORDS)) for _ in range(n)]
    if label != 1:
        lexicon = POS_WORDS if label == 2 else NEG_WORDS
        for _ in range(int(rng.integers(1, 3))):
            tokens[int(rng.integers(0, n))] = str(rng.choice(lexicon))
    parents = [0] + [int(rng.integers(0, i)) + 1 for i in range(1, n)]
    return SstExample(tokens=tokens, parents=parents, label=label)


def synthetic_corpus(n_train=2000, n_dev=400, seed=777):
    rng = make_rng(seed)
    train = [synthetic_example(rng) for _ in range(n_train)]
    dev = [synthetic_example(rng) for _ in range(n_dev)]
    return train, dev


def majority_baseline(examples) -> float:
    counts = np.bincount([ex.label for ex in examples], minlength=3)
    return counts.max() / len(examples)
