import numpy as np
import pytest

from treesent.corpus import ROOT, DepTree, EmbeddingTable, SstExample, Token
from treesent.nncore import make_rng


def make_tree(words, heads, upos=None, deprels=None, chunk_spans=None):
    """Build a DepTree from 1-based heads (0 = root)."""
    upos = upos or ["NOUN"] * len(words)
    deprels = deprels or ["dep"] * len(words)
    tokens = [
        Token(index=i + 1, surface=w, lemma=w.lower(), upos=p, deprel=d,
              head=ROOT if h == 0 else h - 1)
        for i, (w, h, p, d) in enumerate(zip(words, heads, upos, deprels))
    ]
    return DepTree(tokens, chunk_spans=chunk_spans)


def random_dep_tree(rng, n_max=8, n_min=1):
    """Random tree: node i > 0 attaches to a random earlier node."""
    n = int(rng.integers(n_min, n_max + 1))
    words = [f"w{int(rng.integers(0, 20))}" for _ in range(n)]
    heads = [0] + [int(rng.integers(0, i)) + 1 for i in range(1, n)]
    upos = [str(rng.choice(["NOUN", "VERB", "ADJ", "ADV", "DET"])) for _ in range(n)]
    return make_tree(words, heads, upos=upos)


def random_embeddings(rng, words, dim):
    entries = {w: rng.normal(size=dim) for w in sorted(set(words))}
    return EmbeddingTable(dim=dim, entries=entries)


def random_sst_example(rng, n_max=6, n_min=1, vocab=20):
    n = int(rng.integers(n_min, n_max + 1))
    tokens = [f"w{int(rng.integers(0, vocab))}" for _ in range(n)]
    parents = [0] + [int(rng.integers(0, i)) + 1 for i in range(1, n)]
    return SstExample(tokens=tokens, parents=parents,
                      label=int(rng.integers(0, 3)))


@pytest.fixture
def rng():
    return make_rng(12345)


def fig1_tree(chunk_spans=None):
    """'The food is pretty good' parsed with the auxiliary as root."""
    return make_tree(
        ["The", "food", "is", "pretty", "good"],
        [2, 3, 0, 5, 3],
        upos=["DET", "NOUN", "AUX", "ADV", "ADJ"],
        deprels=["det", "nsubj", "ROOT", "advmod", "acomp"],
        chunk_spans=chunk_spans,
    )
