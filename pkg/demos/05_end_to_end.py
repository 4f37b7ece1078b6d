"""The whole pipeline through the two command-line tools.

In a scratch directory: `prep parse` turns raw sentences into enriched
CoNLL-U and `prep gold` normalizes the annotation file; then the main
tool trains a model on a small synthetic treebank, extracts triplets
from the parses, and scores them against gold. Everything between the
stages is a documented on-disk format, so each step is inspectable.

Run: python demos/05_end_to_end.py
"""

import json
import pathlib
import random
import subprocess
import sys
import tempfile

import numpy as np


def run(*argv):
    print(f"$ {' '.join(argv)}")
    result = subprocess.run(argv, capture_output=True, text=True)
    if result.returncode != 0:
        sys.exit(f"failed ({result.returncode}):\n{result.stderr}")
    return result.stdout


CUES = {0: ["awful", "slow"], 1: ["table", "menu"], 2: ["superb", "tasty"]}
FILLER = ["the", "a", "we", "thing", "it", "was", "place",
          "food", "service", "is"]
VOCAB = sorted(set(FILLER + sum(CUES.values(), [])
                   + ["food", "service", "is", "and", "very"]))

with tempfile.TemporaryDirectory() as tmp:
    base = pathlib.Path(tmp)

    # -- corpus prep: raw text + public-format gold in, model food out
    (base / "raw.txt").write_text(
        "the food is superb\nthe service was awful\n")
    (base / "gold_raw.txt").write_text(
        "the food is superb####[([1], [3], 'POS')]\n"
        "the service was awful####[([1], [3], 'NEG')]\n")
    print(run("prep", "parse", "--backend", "heuristic",
              "--in", str(base / "raw.txt"),
              "--out", str(base / "test.conllu")).strip())
    print(run("prep", "gold", "--in", str(base / "gold_raw.txt"),
              "--out", str(base / "gold.jsonl")).strip())

    # -- synthetic root-labeled treebank + embeddings for training
    rng = random.Random(7)
    vec_rng = np.random.default_rng(7)
    sst = base / "sst"
    sst.mkdir()
    for stem, count in (("train", 450), ("dev", 90)):
        toks, parents, labels = [], [], []
        for i in range(count):
            label = i % 3
            n = rng.randint(3, 6)
            words = [rng.choice(FILLER) for _ in range(n)]
            words[rng.randrange(n)] = rng.choice(CUES[label])
            toks.append(" ".join(words))
            # star tree rooted at the last token, like a short clause
            parents.append(" ".join([str(n)] * (n - 1) + ["0"]))
            labels.append(str([1, 2, 4][label]))  # 5-class, collapsed on read
        for ext, lines in (("toks", toks), ("parents", parents),
                           ("labels", labels)):
            (sst / f"{stem}.{ext}").write_text("\n".join(lines) + "\n")
    with open(base / "vectors.txt", "w") as f:
        for word in VOCAB:
            vec = vec_rng.standard_normal(8)
            f.write(word + " " + " ".join(f"{x:.5f}" for x in vec) + "\n")

    (base / "config.yaml").write_text(f"""\
paths:
  embeddings: {base / 'vectors.txt'}
  sst_dir: {sst}
  parses: {base / 'test.conllu'}
  gold: {base / 'gold.jsonl'}
  checkpoint: {base / 'model.bin'}
  predictions: {base / 'predictions.jsonl'}
  report: {base / 'report.txt'}
  curve: {base / 'curve.jsonl'}
model:
  hidden_dim: 12
  embed_dim: 8
  epochs: 6
  lr: 0.05
  seed: 42
""")

    # -- train, extract, evaluate
    run("treesent", "--config", str(base / "config.yaml"), "train")
    curve = [json.loads(l) for l in (base / "curve.jsonl").read_text().splitlines()]
    print("dev curve:", [round(row["dev_accuracy"], 3)
                         for row in curve if "dev_accuracy" in row])
    run("treesent", "--config", str(base / "config.yaml"), "extract")
    for line in (base / "predictions.jsonl").read_text().splitlines():
        record = json.loads(line)
        for target in record["targets"]:
            print(f"extracted: ({' '.join(target['target_tokens'])!r}, "
                  f"{target['sentiment']}, "
                  f"{' '.join(target['opinions']['SS']['tokens'])!r})")
    print(run("treesent", "--config", str(base / "config.yaml"), "evaluate"))
