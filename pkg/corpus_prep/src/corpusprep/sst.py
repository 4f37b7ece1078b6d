"""Sentiment-treebank release to the toks/parents/labels layout."""

from __future__ import annotations

import os

from .backends import ParseFailure, ParserBackend
from .manifest import PrepManifest


class SstConversionError(Exception):
    """The conversion would produce corrupt (misaligned) output."""


def bucket_sentiment(value: float) -> int:
    """Map a [0, 1] sentiment value to the 5-class label space.

    Cut points 0.2 / 0.4 / 0.6 / 0.8, upper-inclusive.
    """
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"sentiment value out of range: {value}")
    for label, cut in enumerate((0.2, 0.4, 0.6, 0.8)):
        if value <= cut:
            return label
    return 4


def _read_release(source_dir):
    with open(os.path.join(source_dir, "SOStr.txt"), encoding="utf-8") as f:
        token_lines = [line.rstrip("\n") for line in f if line.strip()]
    phrase_ids = {}
    with open(os.path.join(source_dir, "dictionary.txt"), encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            phrase, _, pid = line.rpartition("|")
            phrase_ids[phrase] = int(pid)
    values = {}
    with open(os.path.join(source_dir, "sentiment_labels.txt"),
              encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or (lineno == 1 and not line[0].isdigit()):
                continue
            pid, _, value = line.partition("|")
            values[int(pid)] = float(value)
    return token_lines, phrase_ids, values


def convert_sst(source_dir, output_dir, backend: ParserBackend,
                stem: str = "sst") -> PrepManifest:
    """Convert a treebank release into parallel toks/parents/labels files.

    Tokens come from the release (``SOStr.txt``, ``|``-separated);
    dependency parents from the pinned backend; labels are the 5-class
    bucket of each sentence's root sentiment value, resolved through
    ``dictionary.txt`` and ``sentiment_labels.txt``. A sentence whose
    phrase or label is missing, or that the backend cannot parse, is
    dropped from all three files consistently and counted as a
    failure. Misaligned output aborts instead of being written.
    """
    token_lines, phrase_ids, values = _read_release(source_dir)
    toks, parents, labels = [], [], []
    sentences = failures = 0
    for line in token_lines:
        sentences += 1
        tokens = line.split("|")
        phrase = " ".join(tokens)
        pid = phrase_ids.get(phrase)
        if pid is None or pid not in values:
            failures += 1
            continue
        try:
            parsed = backend.parse_tokens(tokens)
        except ParseFailure:
            failures += 1
            continue
        toks.append(" ".join(tokens))
        parents.append(" ".join(str(t.head) for t in parsed.tokens))
        labels.append(str(bucket_sentiment(values[pid])))
    if not len(toks) == len(parents) == len(labels):
        raise SstConversionError(
            f"misaligned output: {len(toks)} toks, {len(parents)} parents, "
            f"{len(labels)} labels"
        )
    os.makedirs(output_dir, exist_ok=True)
    for ext, lines in (("toks", toks), ("parents", parents),
                       ("labels", labels)):
        with open(os.path.join(output_dir, f"{stem}.{ext}"), "w",
                  encoding="utf-8") as f:
            for item in lines:
                f.write(item + "\n")
    return PrepManifest(
        input_path=str(source_dir), output_path=str(output_dir),
        parser_model=backend.model_id, parser_version=backend.model_version,
        sentences=sentences, emitted=len(toks), failures=failures,
    )
