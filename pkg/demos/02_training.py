"""Training the tree-LSTM on root-labeled dependency trees.

Builds a small synthetic 3-class corpus whose sentiment is carried by
lexicon words, trains with per-example Adagrad updates, plots the dev
curve as text, and round-trips the best model through the checkpoint
format.

Run: python demos/02_training.py
"""

import os
import random
import tempfile

import numpy as np

from treesent import (EmbeddingTable, TrainConfig, init_params,
                      load_checkpoint, save_checkpoint, train)
from treesent.corpus import SstExample
from treesent.dtlstm import dev_accuracy
from treesent.nncore import make_rng

EMBED, HIDDEN = 10, 16
CUES = {0: ["awful", "dreadful"], 1: ["table", "menu"],
        2: ["superb", "lovely"]}
FILLER = ["the", "a", "we", "saw", "place", "thing", "it", "was"]
VOCAB = FILLER + [w for ws in CUES.values() for w in ws]


def make_example(rng: random.Random, label: int) -> SstExample:
    n = rng.randint(3, 6)
    tokens = [rng.choice(FILLER) for _ in range(n)]
    tokens[rng.randrange(n)] = rng.choice(CUES[label])
    # simple chain tree: token i hangs off token i+1, last token is root
    parents = list(range(2, n + 1)) + [0]
    return SstExample(tokens=tokens, parents=parents, label=label)


rng = random.Random(99)
train_set = [make_example(rng, i % 3) for i in range(600)]
dev_set = [make_example(rng, i % 3) for i in range(150)]

vec_rng = make_rng(4)
emb = EmbeddingTable(dim=EMBED, entries={
    w: vec_rng.standard_normal(EMBED) for w in VOCAB})

params = init_params(HIDDEN, EMBED, seed=11)
report = train(params, train_set, dev_set, emb,
               TrainConfig(epochs=8, lr=0.01, seed=5))

print("epoch  train-loss  dev-accuracy")
for epoch, (loss, acc) in enumerate(zip(report.train_losses,
                                        report.dev_curve), start=1):
    bar = "#" * int(acc * 40)
    marker = "  <- selected" if epoch == report.best_epoch else ""
    print(f"{epoch:>5}  {loss:>10.4f}  {acc:.3f} {bar}{marker}")

print(f"\nbest dev epoch: {report.best_epoch} "
      f"(ties keep the earlier epoch)")

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "model.bin")
    save_checkpoint(report.params, path)
    print(f"checkpoint written: {os.path.getsize(path)} bytes")
    restored = load_checkpoint(path)
    before = dev_accuracy(report.params, dev_set, emb)
    after = dev_accuracy(restored, dev_set, emb)
    assert np.isclose(before, after)
    print(f"round-trip dev accuracy unchanged: {after:.3f}")
