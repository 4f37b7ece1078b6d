"""Public ``####``-annotated triplet files to normalized gold records."""

from __future__ import annotations

import ast
import json

from .manifest import PrepManifest

_SENTIMENTS = {"POS", "NEG", "NEU", "POSITIVE", "NEGATIVE", "NEUTRAL"}


def _normalize_line(line: str) -> dict:
    sentence, sep, annotation = line.partition("####")
    if not sep:
        raise ValueError("missing '####' separator")
    sentence = sentence.strip()
    tokens = sentence.split()
    if not tokens:
        raise ValueError("empty sentence")
    raw = ast.literal_eval(annotation.strip())
    triplets = []
    for item in raw:
        target, opinion, sentiment = item
        target = [int(i) for i in target]
        opinion = [int(i) for i in opinion]
        if not target or not opinion:
            raise ValueError("empty target or opinion span")
        for i in target + opinion:
            if not 0 <= i < len(tokens):
                raise ValueError(f"token index {i} out of range")
        if str(sentiment).upper() not in _SENTIMENTS:
            raise ValueError(f"unknown sentiment {sentiment!r}")
        triplets.append({"target": target, "opinion": opinion,
                         "sentiment": str(sentiment).upper()})
    return {"sentence": sentence, "triplets": triplets}


def convert_gold(input_path, output_path) -> tuple[PrepManifest, list[str]]:
    """Normalize a ``sentence####[([t], [o], 'POS'), ...]`` file to JSONL.

    Returns the manifest and a list of skip reports, one per malformed
    line, each carrying the line number. Malformed lines never abort
    the batch.
    """
    records = []
    issues = []
    sentences = failures = 0
    with open(input_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            sentences += 1
            try:
                records.append(_normalize_line(line))
            except (ValueError, SyntaxError, TypeError) as exc:
                failures += 1
                issues.append(f"line {lineno}: {exc}")
    with open(output_path, "w", encoding="utf-8") as out:
        for record in records:
            out.write(json.dumps(record, sort_keys=True) + "\n")
    manifest = PrepManifest(
        input_path=str(input_path), output_path=str(output_path),
        parser_model="none", parser_version="none",
        sentences=sentences, emitted=len(records), failures=failures,
    )
    return manifest, issues
