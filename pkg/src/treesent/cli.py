"""Command-line entry point: ``train``, ``extract``, ``evaluate``.

One declarative YAML config drives everything; individual keys can be
overridden on the command line with ``--set section.key=value``. The
config path may also come from the ``TREESENT_CONFIG`` environment
variable.

Exit codes: 0 success, 2 config problem, 3 model problem, 4 data
alignment problem, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import yaml

from treesent import corpus, dtlstm, evaluation, extraction
from treesent.nncore import DimensionError

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_ALIGNMENT = 4

DEFAULTS = {
    "paths": {
        "embeddings": None,
        "sst_dir": None,
        "sst_train_stem": "train",
        "sst_dev_stem": "dev",
        "parses": None,
        "gold": None,
        "checkpoint": None,
        "predictions": None,
        "report": None,
        "curve": None,
    },
    "model": {
        "hidden_dim": 150,
        "embed_dim": 300,
        "lr": 0.05,
        "eps": 1e-8,
        "epochs": 10,
        "seed": None,
        "candidate_activation": "tanh",
    },
    "extraction": {
        "methods": list(extraction.METHODS),
        "exclude_target": True,
        "emit_node_log_probs": False,
    },
    "evaluation": {
        "dataset_id": "dataset",
    },
}


class ConfigError(Exception):
    pass


def load_config(path: str | None, overrides: list[str]) -> dict:
    config = {section: dict(values) for section, values in DEFAULTS.items()}
    if path is None:
        path = os.environ.get("TREESENT_CONFIG")
    if path is not None:
        try:
            with open(path, encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} is not a key-value tree")
        for section, values in loaded.items():
            if section not in config:
                raise ConfigError(f"unknown config section {section!r}")
            if not isinstance(values, dict):
                raise ConfigError(f"config section {section!r} is not a mapping")
            for key, value in values.items():
                if key not in config[section]:
                    raise ConfigError(f"unknown config key {section}.{key}")
                config[section][key] = value
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        dotted, raw = item.split("=", 1)
        section, key = dotted.split(".", 1)
        if section not in config or key not in config[section]:
            raise ConfigError(f"unknown config key {dotted}")
        config[section][key] = yaml.safe_load(raw)
    if config["model"]["seed"] is None:
        raise ConfigError("model.seed is mandatory")
    methods = config["extraction"]["methods"]
    if isinstance(methods, str):
        methods = [methods]
    bad = [m for m in methods if m not in extraction.METHODS]
    if bad:
        raise ConfigError(f"unknown extraction methods: {bad}")
    config["extraction"]["methods"] = list(methods)
    if config["model"]["candidate_activation"] not in ("tanh", "sigmoid"):
        raise ConfigError("model.candidate_activation must be tanh or sigmoid")
    return config


def _require_paths(config, keys):
    for key in keys:
        value = config["paths"].get(key)
        if not value:
            raise ConfigError(f"paths.{key} is required for this command")
        if key not in ("checkpoint", "predictions", "report", "curve") \
                and not os.path.exists(value):
            raise ConfigError(f"paths.{key}: no such file or directory: {value}")


def cmd_train(config) -> int:
    _require_paths(config, ["embeddings", "sst_dir", "checkpoint"])
    m = config["model"]
    emb = corpus.load_embeddings(config["paths"]["embeddings"], m["embed_dim"])
    train_set = corpus.read_sst(config["paths"]["sst_dir"],
                                config["paths"]["sst_train_stem"])
    dev_set = corpus.read_sst(config["paths"]["sst_dir"],
                              config["paths"]["sst_dev_stem"])
    params = dtlstm.init_params(m["hidden_dim"], m["embed_dim"], m["seed"],
                                m["candidate_activation"])
    params.embedding_hash = emb.content_hash
    tc = dtlstm.TrainConfig(epochs=int(m["epochs"]), lr=float(m["lr"]),
                            eps=float(m["eps"]), seed=int(m["seed"]))
    report = dtlstm.train(params, train_set, dev_set, emb, tc)
    if tc.epochs == 0:
        print("warning: epochs=0, checkpoint holds the initial parameters",
              file=sys.stderr)
    dtlstm.save_checkpoint(report.params, config["paths"]["checkpoint"])
    curve_path = config["paths"]["curve"]
    if curve_path:
        with open(curve_path, "w", encoding="utf-8") as f:
            for epoch, (acc, loss) in enumerate(
                zip(report.dev_curve, report.train_losses), start=1
            ):
                f.write(json.dumps({"epoch": epoch, "dev_accuracy": acc,
                                    "train_loss": loss}) + "\n")
            f.write(json.dumps({"best_epoch": report.best_epoch}) + "\n")
    print(f"checkpoint written to {config['paths']['checkpoint']} "
          f"(best epoch: {report.best_epoch})")
    return EXIT_OK


def sentence_record(tree, node_preds, methods, exclude_target,
                    emit_node_log_probs=False) -> dict:
    """The per-sentence prediction record written by ``extract``."""
    preds = {i: p for i, (_, p) in node_preds.items()}
    by_span = {}
    order = []
    for method in methods:
        for triplet in extraction.extract_triplets(tree, preds, method,
                                                   exclude_target=exclude_target):
            key = triplet.target_span
            if key not in by_span:
                by_span[key] = {
                    "span": list(key),
                    "target_tokens": triplet.target_tokens,
                    "sentiment": triplet.sentiment,
                    "opinions": {},
                }
                order.append(key)
            by_span[key]["opinions"][method] = {
                "indices": triplet.opinion_indices,
                "tokens": triplet.opinion_tokens,
            }
    record = {"tokens": tree.surfaces(),
              "targets": [by_span[k] for k in order]}
    if emit_node_log_probs:
        record["node_log_probs"] = [
            [float(v) for v in preds[i].log_probs] for i in range(len(tree))
        ]
    return record


def cmd_extract(config) -> int:
    _require_paths(config, ["checkpoint", "embeddings", "parses", "predictions"])
    try:
        params = dtlstm.load_checkpoint(config["paths"]["checkpoint"])
    except dtlstm.CheckpointError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    emb = corpus.load_embeddings(config["paths"]["embeddings"],
                                 config["model"]["embed_dim"])
    if emb.dim != params.embed_dim:
        print(f"model error: checkpoint embed_dim {params.embed_dim} != "
              f"embedding dim {emb.dim}", file=sys.stderr)
        return EXIT_MODEL
    if params.embedding_hash and params.embedding_hash != emb.content_hash:
        print("warning: embedding file differs from the one used at training "
              "time", file=sys.stderr)
    trees = corpus.read_conllu(config["paths"]["parses"])
    ex = config["extraction"]
    with open(config["paths"]["predictions"], "w", encoding="utf-8") as f:
        for tree in trees:
            node_preds = dtlstm.tree_forward(params, tree, emb)
            record = sentence_record(tree, node_preds, ex["methods"],
                                     ex["exclude_target"],
                                     ex["emit_node_log_probs"])
            f.write(json.dumps(record) + "\n")
    print(f"{len(trees)} sentences written to {config['paths']['predictions']}")
    return EXIT_OK


def read_predictions(path) -> list[evaluation.SentencePrediction]:
    """Load an ``extract`` output file back into evaluation inputs."""
    sentences = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            targets = []
            for t in obj.get("targets", []):
                targets.append(evaluation.PredictedTarget(
                    target_tokens=t["target_tokens"],
                    sentiment=t["sentiment"],
                    opinions={m: o["tokens"] for m, o in t["opinions"].items()},
                    span=tuple(t["span"]) if t.get("span") else None,
                ))
            sentences.append(evaluation.SentencePrediction(
                tokens=obj["tokens"], targets=targets))
    return sentences


def cmd_evaluate(config) -> int:
    _require_paths(config, ["predictions", "gold"])
    preds = read_predictions(config["paths"]["predictions"])
    gold = corpus.read_triplet_gold(config["paths"]["gold"])
    methods = tuple(config["extraction"]["methods"])
    report = evaluation.evaluate_all(preds, gold,
                                     dataset_id=config["evaluation"]["dataset_id"],
                                     methods=methods)
    text, records = evaluation.render_report(report)
    out_base = config["paths"]["report"]
    if out_base:
        with open(out_base + ".txt", "w", encoding="utf-8") as f:
            f.write(text)
        with open(out_base + ".jsonl", "w", encoding="utf-8") as f:
            f.write("\n".join(records) + "\n")
    print(text, end="")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="treesent",
        description="Tree-LSTM sentiment triplet extraction pipeline",
    )
    parser.add_argument("--config", help="YAML config path "
                        "(or set TREESENT_CONFIG)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override a single config value")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("train", help="train on the sentiment treebank layout")
    sub.add_parser("extract", help="extract triplets from parsed sentences")
    sub.add_parser("evaluate", help="score predictions against gold triplets")
    args = parser.parse_args(argv)

    handlers = {"train": cmd_train, "extract": cmd_extract,
                "evaluate": cmd_evaluate}
    try:
        config = load_config(args.config, args.overrides)
        return handlers[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (corpus.AlignmentError,) as exc:
        print(f"alignment error: {exc}", file=sys.stderr)
        return EXIT_ALIGNMENT
    except (dtlstm.CheckpointError, DimensionError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (corpus.CorpusError, dtlstm.TrainingError,
            evaluation.EvalInvariantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
