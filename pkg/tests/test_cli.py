import json

import pytest
import yaml

from treesent import cli

DIM = 4
VOCAB = {
    "the": "0.1 0.0 0.0 0.0",
    "food": "0.0 0.6 0.1 0.0",
    "is": "0.0 0.1 0.2 0.0",
    "good": "0.9 0.2 0.0 0.3",
    "bad": "-0.9 0.2 0.0 -0.3",
    "service": "0.0 0.5 0.3 0.1",
    "ok": "0.0 0.0 0.1 0.0",
}


def conllu_block(rows):
    lines = []
    for i, (form, upos, head, deprel) in enumerate(rows, start=1):
        lines.append("\t".join([str(i), form, form.lower(), upos, "_", "_",
                                str(head), deprel, "_", "_"]))
    return "\n".join(lines) + "\n\n"


@pytest.fixture
def workspace(tmp_path):
    emb = tmp_path / "emb.txt"
    emb.write_text("".join(f"{w} {v}\n" for w, v in VOCAB.items()))

    sst = tmp_path / "sst"
    sst.mkdir()
    sentences = [
        (["good", "food"], [2, 0], 4),
        (["bad", "food"], [2, 0], 0),
        (["food", "is", "good"], [2, 0, 2], 3),
        (["food", "is", "bad"], [2, 0, 2], 1),
        (["food", "is", "ok"], [2, 0, 2], 2),
        (["good", "service"], [2, 0], 4),
        (["bad", "service"], [2, 0], 0),
        (["ok", "service"], [2, 0], 2),
    ]
    for stem in ("train", "dev"):
        (sst / f"{stem}.toks").write_text(
            "".join(" ".join(t) + "\n" for t, _, _ in sentences))
        (sst / f"{stem}.parents").write_text(
            "".join(" ".join(map(str, p)) + "\n" for _, p, _ in sentences))
        (sst / f"{stem}.labels").write_text(
            "".join(f"{l}\n" for _, _, l in sentences))

    parses = tmp_path / "test.conllu"
    parses.write_text(
        conllu_block([("the", "DET", 2, "det"), ("food", "NOUN", 3, "nsubj"),
                      ("is", "AUX", 0, "ROOT"), ("good", "ADJ", 3, "acomp")])
        + conllu_block([("service", "NOUN", 2, "nsubj"),
                        ("is", "AUX", 0, "ROOT"), ("bad", "ADJ", 2, "acomp")])
    )
    gold = tmp_path / "gold.txt"
    gold.write_text(
        "the food is good####[([1], [3], 'POS')]\n"
        "service is bad####[([0], [2], 'NEG')]\n"
    )

    config = {
        "paths": {
            "embeddings": str(emb),
            "sst_dir": str(sst),
            "sst_train_stem": "train",
            "sst_dev_stem": "dev",
            "parses": str(parses),
            "gold": str(gold),
            "checkpoint": str(tmp_path / "model.ckpt"),
            "predictions": str(tmp_path / "preds.jsonl"),
            "report": str(tmp_path / "report"),
            "curve": str(tmp_path / "curve.jsonl"),
        },
        "model": {"hidden_dim": 8, "embed_dim": DIM, "epochs": 10,
                  "lr": 0.1, "seed": 3},
        "extraction": {"emit_node_log_probs": True},
    }
    config_path = tmp_path / "config.yaml"
    config_path.write_text(yaml.safe_dump(config))
    return tmp_path, config_path, config


class TestPipeline:
    def test_train_extract_evaluate(self, workspace):
        tmp_path, config_path, config = workspace
        assert cli.main(["--config", str(config_path), "train"]) == 0
        curve_rows = [json.loads(l) for l in
                      (tmp_path / "curve.jsonl").read_text().splitlines()]
        assert len(curve_rows) == 11  # 10 epochs + best-epoch summary
        assert "best_epoch" in curve_rows[-1]

        assert cli.main(["--config", str(config_path), "extract"]) == 0
        records = [json.loads(l) for l in
                   (tmp_path / "preds.jsonl").read_text().splitlines()]
        assert len(records) == 2
        assert records[0]["targets"][0]["target_tokens"] == ["the", "food"]
        assert len(records[0]["node_log_probs"]) == 4

        assert cli.main(["--config", str(config_path), "evaluate"]) == 0
        report_text = (tmp_path / "report.txt").read_text()
        assert "-- targets --" in report_text
        lines = (tmp_path / "report.jsonl").read_text().splitlines()
        assert all(json.loads(l) for l in lines)

    def test_empty_input_extract(self, workspace, tmp_path):
        _, config_path, config = workspace
        assert cli.main(["--config", str(config_path), "train"]) == 0
        empty = tmp_path / "empty.conllu"
        empty.write_text("")
        code = cli.main(["--config", str(config_path),
                         "--set", f"paths.parses={empty}", "extract"])
        assert code == 0
        assert (tmp_path / "preds.jsonl").read_text() == ""


class TestExitCodes:
    def test_missing_embeddings_is_config_error(self, workspace):
        _, config_path, _ = workspace
        code = cli.main(["--config", str(config_path),
                         "--set", "paths.embeddings=/nonexistent/emb.txt",
                         "train"])
        assert code == 2

    def test_missing_seed_is_config_error(self, workspace, tmp_path):
        _, config_path, config = workspace
        config["model"].pop("seed")
        bad = tmp_path / "noseed.yaml"
        bad.write_text(yaml.safe_dump(config))
        assert cli.main(["--config", str(bad), "train"]) == 2

    def test_bad_checkpoint_is_model_error(self, workspace, tmp_path):
        _, config_path, _ = workspace
        junk = tmp_path / "junk.ckpt"
        junk.write_bytes(b"JUNKJUNK" + b"\x00" * 64)
        code = cli.main(["--config", str(config_path),
                         "--set", f"paths.checkpoint={junk}", "extract"])
        assert code == 3

    def test_misaligned_gold_is_alignment_error(self, workspace, tmp_path):
        _, config_path, _ = workspace
        assert cli.main(["--config", str(config_path), "train"]) == 0
        assert cli.main(["--config", str(config_path), "extract"]) == 0
        short_gold = tmp_path / "short_gold.txt"
        short_gold.write_text("the food is good####[([1], [3], 'POS')]\n")
        code = cli.main(["--config", str(config_path),
                         "--set", f"paths.gold={short_gold}", "evaluate"])
        assert code == 4

    def test_epochs_zero_still_writes_checkpoint(self, workspace, tmp_path):
        tmp_path_, config_path, _ = workspace
        code = cli.main(["--config", str(config_path),
                         "--set", "model.epochs=0", "train"])
        assert code == 0
        assert (tmp_path_ / "model.ckpt").exists()

    def test_env_var_config(self, workspace, monkeypatch):
        _, config_path, _ = workspace
        monkeypatch.setenv("TREESENT_CONFIG", str(config_path))
        assert cli.main(["train"]) == 0
