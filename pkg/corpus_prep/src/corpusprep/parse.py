"""Raw sentences to enriched CoNLL-U."""

from __future__ import annotations

from .backends import ParseFailure, ParsedSentence, ParserBackend
from .manifest import PrepManifest


def format_conllu_block(parsed: ParsedSentence) -> str:
    """Render one sentence as a 10-column CoNLL-U block.

    Noun chunks become MISC ``Chunk=B`` / ``Chunk=I`` marks; unused
    columns hold ``_``.
    """
    marks = ["_"] * len(parsed.tokens)
    for start, end in parsed.chunk_spans:
        marks[start] = "Chunk=B"
        for k in range(start + 1, end):
            marks[k] = "Chunk=I"
    lines = []
    for i, tok in enumerate(parsed.tokens):
        lines.append("\t".join([
            str(i + 1), tok.surface, tok.lemma, tok.upos, "_", "_",
            str(tok.head), tok.deprel, "_", marks[i],
        ]))
    return "\n".join(lines) + "\n"


def parse_corpus(input_path, output_path, backend: ParserBackend) -> PrepManifest:
    """Parse one sentence per line into enriched CoNLL-U.

    Blank lines are skipped and not counted. A sentence the backend
    cannot parse is skipped and counted as a failure; the batch never
    aborts. Blocks are written in input order, blank-line separated.
    """
    sentences = emitted = failures = 0
    blocks = []
    with open(input_path, encoding="utf-8") as f:
        for line in f:
            text = line.strip()
            if not text:
                continue
            sentences += 1
            try:
                parsed = backend.parse(text)
            except ParseFailure:
                failures += 1
                continue
            blocks.append(format_conllu_block(parsed))
            emitted += 1
    with open(output_path, "w", encoding="utf-8") as out:
        for block in blocks:
            out.write(block)
            out.write("\n")
    return PrepManifest(
        input_path=str(input_path), output_path=str(output_path),
        parser_model=backend.model_id, parser_version=backend.model_version,
        sentences=sentences, emitted=emitted, failures=failures,
    )
