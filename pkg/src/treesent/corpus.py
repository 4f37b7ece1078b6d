"""Readers and writers for every external data format.

Covers enriched CoNLL-U parses (with noun-chunk marks in the MISC
column), the toks/parents/labels sentiment-treebank layout, plain-text
embedding files, and triplet gold annotations in both the public
``####``-delimited format and a normalized JSON-lines format.
"""

from __future__ import annotations

import ast
import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from treesent.labels import normalize_label

# Sentinel head value for the root token (heads are stored 0-based).
ROOT = -1


class CorpusError(Exception):
    """Base class for data-format problems."""


class ConlluFormatError(CorpusError):
    pass


class DepTreeError(CorpusError):
    pass


class EmbeddingFormatError(CorpusError):
    pass


class GoldFormatError(CorpusError):
    pass


class AlignmentError(CorpusError):
    pass


@dataclass(frozen=True)
class Token:
    index: int          # 1-based position in the sentence
    surface: str
    lemma: str
    upos: str
    deprel: str
    head: int           # 0-based index of the parent, or ROOT


class DepTree:
    """A dependency parse: tokens plus the derived child adjacency.

    ``chunk_spans`` is an optional list of half-open (start, end)
    0-based token ranges marking noun chunks supplied by an external
    chunker; when present they override the built-in chunking rules.
    """

    def __init__(self, tokens, chunk_spans=None, sentence_id=None):
        self.tokens: list[Token] = list(tokens)
        self.chunk_spans: list[tuple[int, int]] | None = (
            [tuple(s) for s in chunk_spans] if chunk_spans is not None else None
        )
        self.sentence_id = sentence_id
        self._validate()
        n = len(self.tokens)
        self.children: list[list[int]] = [[] for _ in range(n)]
        for i, tok in enumerate(self.tokens):
            if tok.head != ROOT:
                self.children[tok.head].append(i)
        self.root: int = next(i for i, t in enumerate(self.tokens) if t.head == ROOT)
        self._check_tree()

    def _validate(self):
        if not self.tokens:
            raise DepTreeError("empty sentence")
        n = len(self.tokens)
        seen = set()
        roots = 0
        for i, tok in enumerate(self.tokens):
            if tok.index in seen:
                raise DepTreeError(f"duplicate token index {tok.index}")
            seen.add(tok.index)
            if tok.head == ROOT:
                roots += 1
            elif tok.head == i:
                raise DepTreeError(f"self-loop at token {tok.index}")
            elif not 0 <= tok.head < n:
                raise DepTreeError(f"head {tok.head} out of range at token {tok.index}")
        if roots != 1:
            raise DepTreeError(f"expected exactly one root, found {roots}")
        if self.chunk_spans is not None:
            prev_end = 0
            for start, end in sorted(self.chunk_spans):
                if not (0 <= start < end <= n):
                    raise DepTreeError(f"chunk span ({start}, {end}) out of bounds")
                if start < prev_end:
                    raise DepTreeError(f"overlapping chunk span ({start}, {end})")
                prev_end = end

    def _check_tree(self):
        # Every node must be reachable from the root (no cycles).
        seen = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node in seen:
                raise DepTreeError(f"cycle through token {self.tokens[node].index}")
            seen.add(node)
            stack.extend(self.children[node])
        if len(seen) != len(self.tokens):
            missing = min(i for i in range(len(self.tokens)) if i not in seen)
            raise DepTreeError(
                f"cycle: token {self.tokens[missing].index} unreachable from root"
            )

    def __len__(self):
        return len(self.tokens)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def subtree(self, node: int) -> list[int]:
        """All 0-based indices in the subtree of ``node`` (the node's yield)."""
        out = []
        stack = [node]
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(self.children[i])
        return sorted(out)

    def postorder(self) -> list[int]:
        """Children-before-parent traversal order from the root."""
        order = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
            else:
                stack.append((node, True))
                for child in reversed(self.children[node]):
                    stack.append((child, False))
        return order

    def __eq__(self, other):
        if not isinstance(other, DepTree):
            return NotImplemented
        return self.tokens == other.tokens and self.chunk_spans == other.chunk_spans

    def __repr__(self):
        return f"DepTree({' '.join(self.surfaces())!r})"


@dataclass
class EmbeddingTable:
    """Word vectors with a total lookup (unknown words hit ``oov_vector``)."""

    dim: int
    entries: dict[str, np.ndarray]
    oov_vector: np.ndarray = None
    skipped_lines: int = 0
    content_hash: str = ""

    def __post_init__(self):
        if self.oov_vector is None:
            self.oov_vector = np.zeros(self.dim)

    def lookup(self, word: str) -> np.ndarray:
        vec = self.entries.get(word)
        if vec is None:
            vec = self.entries.get(word.lower())
        return vec if vec is not None else self.oov_vector

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class GoldTriplet:
    target_span: tuple[int, ...]   # 0-based token indices
    opinion_span: tuple[int, ...]
    sentiment: str                 # canonical label


@dataclass
class GoldRecord:
    sentence_tokens: list[str]
    triplets: list[GoldTriplet]

    def target_tokens(self, triplet: GoldTriplet) -> list[str]:
        return [self.sentence_tokens[i] for i in triplet.target_span]

    def opinion_tokens(self, triplet: GoldTriplet) -> list[str]:
        return [self.sentence_tokens[i] for i in triplet.opinion_span]


@dataclass
class SstExample:
    tokens: list[str]
    parents: list[int]   # 1-based head per token, 0 = root
    label: int           # collapsed 3-class index at the root

    def children(self) -> list[list[int]]:
        kids = [[] for _ in self.tokens]
        for i, p in enumerate(self.parents):
            if p != 0:
                kids[p - 1].append(i)
        return kids

    def root(self) -> int:
        return self.parents.index(0)


def load_embeddings(path, dim: int) -> EmbeddingTable:
    """Load a ``word v1 ... v_dim`` text file.

    Lines with the wrong field count or unparseable floats are skipped
    (multi-word keys are common in big embedding dumps); the skip count
    is kept on the returned table. A file with zero usable lines is a
    format error.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    entries = {}
    skipped = 0
    hasher = hashlib.sha256()
    with open(path, "rb") as f:
        for raw in f:
            hasher.update(raw)
            parts = raw.decode("utf-8", errors="replace").rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                skipped += 1
                continue
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError:
                skipped += 1
                continue
            entries[parts[0]] = vec
    if not entries:
        raise EmbeddingFormatError(f"no parseable embedding lines in {path}")
    return EmbeddingTable(dim=dim, entries=entries, skipped_lines=skipped,
                          content_hash=hasher.hexdigest())


def _parse_misc_chunks(misc_values: list[str]) -> list[tuple[int, int]]:
    """Rebuild chunk spans from per-token Chunk=B / Chunk=I marks."""
    spans = []
    start = None
    for i, misc in enumerate(misc_values):
        marks = dict(
            kv.split("=", 1) for kv in misc.split("|") if "=" in kv
        ) if misc not in ("", "_") else {}
        mark = marks.get("Chunk")
        if mark == "B":
            if start is not None:
                spans.append((start, i))
            start = i
        elif mark == "I" and start is not None:
            continue
        else:
            if start is not None:
                spans.append((start, i))
                start = None
    if start is not None:
        spans.append((start, len(misc_values)))
    return spans


def read_conllu(path, on_invalid: str = "raise", issues: list | None = None) -> list[DepTree]:
    """Read enriched CoNLL-U into dependency trees.

    Blocks are blank-line separated; ``#`` lines are comments; each
    token line has 10 tab-separated columns. Multiword-token and empty
    node lines (ids with ``-`` or ``.``) are ignored. Chunk spans come
    from MISC ``Chunk=B/I`` marks.

    ``on_invalid`` controls what happens to a block whose head
    structure violates the tree invariants: ``"raise"`` aborts,
    ``"skip"`` rejects that sentence and records the error message in
    ``issues`` (if a list is supplied).
    """
    if on_invalid not in ("raise", "skip"):
        raise ValueError("on_invalid must be 'raise' or 'skip'")
    trees = []
    block: list[tuple[int, list[str]]] = []
    sent_no = 0

    def flush():
        nonlocal sent_no
        if not block:
            return
        sent_no += 1
        tokens = []
        miscs = []
        for lineno, cols in block:
            idx = int(cols[0])
            head_col = int(cols[6])
            head = ROOT if head_col == 0 else head_col - 1
            tokens.append(Token(index=idx, surface=cols[1], lemma=cols[2],
                                upos=cols[3], deprel=cols[7], head=head))
            miscs.append(cols[9])
        spans = _parse_misc_chunks(miscs)
        try:
            tree = DepTree(tokens, chunk_spans=spans if spans else None,
                           sentence_id=sent_no)
        except DepTreeError as exc:
            msg = f"sentence {sent_no}: {exc}"
            if on_invalid == "raise":
                raise DepTreeError(msg) from exc
            if issues is not None:
                issues.append(msg)
        else:
            trees.append(tree)
        block.clear()

    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush()
                continue
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ConlluFormatError(
                    f"{path}:{lineno}: expected 10 columns, got {len(cols)}"
                )
            if "-" in cols[0] or "." in cols[0]:
                continue
            try:
                int(cols[0]), int(cols[6])
            except ValueError as exc:
                raise ConlluFormatError(f"{path}:{lineno}: bad index/head column") from exc
            block.append((lineno, cols))
    flush()
    return trees


def write_conllu(trees, path):
    """Write trees as enriched CoNLL-U; inverse of :func:`read_conllu`."""
    with open(path, "w", encoding="utf-8") as f:
        for tree in trees:
            marks = [""] * len(tree)
            for start, end in tree.chunk_spans or []:
                marks[start] = "Chunk=B"
                for i in range(start + 1, end):
                    marks[i] = "Chunk=I"
            for i, tok in enumerate(tree.tokens):
                head_col = 0 if tok.head == ROOT else tok.head + 1
                misc = marks[i] if marks[i] else "_"
                f.write("\t".join([
                    str(tok.index), tok.surface, tok.lemma, tok.upos, "_", "_",
                    str(head_col), tok.deprel, "_", misc,
                ]) + "\n")
            f.write("\n")


def collapse_sst_label(label: int) -> int:
    """Collapse a 5-class sentiment label to the 3-class space."""
    if label in (0, 1):
        return 0
    if label == 2:
        return 1
    if label in (3, 4):
        return 2
    raise ValueError(f"SST label out of range: {label}")


def read_sst(directory, stem: str | None = None) -> list[SstExample]:
    """Read the parallel ``<stem>.toks`` / ``.parents`` / ``.labels`` layout.

    With ``stem=None`` the directory must contain exactly one stem that
    has all three files.
    """
    if stem is None:
        stems = sorted(
            name[:-5] for name in os.listdir(directory) if name.endswith(".toks")
        )
        stems = [s for s in stems
                 if os.path.exists(os.path.join(directory, s + ".parents"))
                 and os.path.exists(os.path.join(directory, s + ".labels"))]
        if len(stems) != 1:
            raise CorpusError(
                f"need an explicit stem: found {stems or 'none'} in {directory}"
            )
        stem = stems[0]
    paths = {ext: os.path.join(directory, f"{stem}.{ext}")
             for ext in ("toks", "parents", "labels")}
    lines = {}
    for ext, p in paths.items():
        with open(p, encoding="utf-8") as f:
            lines[ext] = [ln.rstrip("\n") for ln in f]
        while lines[ext] and not lines[ext][-1].strip():
            lines[ext].pop()
    counts = {ext: len(v) for ext, v in lines.items()}
    if len(set(counts.values())) != 1:
        raise AlignmentError(f"line counts differ across {paths}: {counts}")
    examples = []
    for i, (toks, parents, label) in enumerate(
        zip(lines["toks"], lines["parents"], lines["labels"]), start=1
    ):
        tokens = toks.split()
        heads = [int(x) for x in parents.split()]
        if len(tokens) != len(heads):
            raise AlignmentError(
                f"{stem} line {i}: {len(tokens)} tokens vs {len(heads)} parents"
            )
        examples.append(SstExample(tokens=tokens, parents=heads,
                                   label=collapse_sst_label(int(label))))
    return examples


def _gold_from_json(obj, lineno) -> GoldRecord:
    sentence = obj["sentence"]
    tokens = sentence.split() if isinstance(sentence, str) else list(sentence)
    triplets = []
    for t in obj.get("triplets", []):
        triplets.append(GoldTriplet(
            target_span=tuple(t["target"]),
            opinion_span=tuple(t["opinion"]),
            sentiment=normalize_label(t["sentiment"]),
        ))
    return _check_gold(GoldRecord(tokens, triplets), lineno)


def _gold_from_hashes(line, lineno) -> GoldRecord:
    sentence, _, annotation = line.partition("####")
    tokens = sentence.split()
    try:
        raw = ast.literal_eval(annotation.strip())
    except (ValueError, SyntaxError) as exc:
        raise GoldFormatError(f"line {lineno}: bad annotation literal") from exc
    triplets = []
    for item in raw:
        target, opinion, sentiment = item
        triplets.append(GoldTriplet(
            target_span=tuple(target),
            opinion_span=tuple(opinion),
            sentiment=normalize_label(sentiment),
        ))
    return _check_gold(GoldRecord(tokens, triplets), lineno)


def _check_gold(record: GoldRecord, lineno) -> GoldRecord:
    n = len(record.sentence_tokens)
    for t in record.triplets:
        for i in list(t.target_span) + list(t.opinion_span):
            if not 0 <= i < n:
                raise GoldFormatError(f"line {lineno}: token index {i} out of range")
    return record


def read_triplet_gold(path) -> list[GoldRecord]:
    """Read gold triplets.

    Accepts the public ``sentence####[([t], [o], 'POS'), ...]`` release
    format and the normalized JSON-lines format (objects with
    ``sentence`` and ``triplets`` fields), mixed freely per line.
    """
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("{"):
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise GoldFormatError(f"line {lineno}: bad JSON") from exc
                records.append(_gold_from_json(obj, lineno))
            elif "####" in line:
                records.append(_gold_from_hashes(line, lineno))
            else:
                raise GoldFormatError(f"line {lineno}: unrecognized gold format")
    return records
