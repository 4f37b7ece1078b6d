"""Pluggable dependency-parser backends.

A backend turns one sentence into a flat list of tokens with a
single-rooted dependency tree and non-overlapping base noun-chunk
spans. :class:`SpacyBackend` wraps an industrial pipeline when spaCy
is installed; :class:`HeuristicBackend` is a deterministic rule-based
fallback with no dependencies, so batch conversion always works and is
reproducible byte-for-byte. Either way the backend identifier and
version travel with the output via the manifest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol


class ParseFailure(Exception):
    """A single sentence could not be parsed; the batch continues."""


@dataclass(frozen=True)
class ParsedToken:
    surface: str
    lemma: str
    upos: str
    head: int      # 1-based head index, 0 = root
    deprel: str


@dataclass(frozen=True)
class ParsedSentence:
    tokens: list[ParsedToken]
    chunk_spans: list[tuple[int, int]]  # 0-based half-open token spans


class ParserBackend(Protocol):
    model_id: str
    model_version: str

    def parse(self, text: str) -> ParsedSentence: ...

    def parse_tokens(self, tokens: list[str]) -> ParsedSentence: ...


_TOKEN_RE = re.compile(r"'[A-Za-z]+|[A-Za-z0-9]+|[^\sA-Za-z0-9']")

_DETS = {"the", "a", "an", "this", "that", "these", "those", "some",
         "any", "no", "each", "every"}
_AUX = {"is", "was", "were", "are", "am", "be", "been", "being",
        "'s", "'re", "'m"}
_PRON = {"i", "you", "he", "she", "it", "we", "they", "me", "him",
         "her", "us", "them", "everything", "something", "nothing"}
_ADP = {"of", "in", "on", "at", "with", "for", "from", "by", "about",
        "over", "under", "into", "to"}
_CCONJ = {"and", "or", "but", "nor"}
_PART = {"not", "n't", "'t"}
_ADV = {"very", "pretty", "too", "quite", "really", "so", "never",
        "always", "here", "there", "often", "again"}
_ADJ = {"good", "bad", "great", "nice", "fine", "excellent", "terrible",
        "awful", "amazing", "poor", "fresh", "stale", "tasty", "bland",
        "delicious", "friendly", "rude", "slow", "fast", "cheap",
        "expensive", "clean", "dirty", "cold", "hot", "warm", "new",
        "old", "big", "small", "tiny", "huge", "best", "worst",
        "better", "worse", "decent", "mediocre", "superb", "dry"}
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less")
_VERB = {"love", "loved", "loves", "hate", "hated", "hates", "like",
         "liked", "likes", "recommend", "recommended", "recommends",
         "think", "thought", "go", "went", "come", "came", "try",
         "tried", "order", "ordered", "eat", "ate", "serve", "served",
         "serves", "take", "took", "get", "got", "make", "made",
         "have", "had", "has", "want", "wanted", "say", "said",
         "arrive", "arrived", "enjoy", "enjoyed", "wait", "waited",
         "return", "returned", "avoid", "avoided", "brought", "bring",
         "gave", "give", "found", "find", "felt", "feel", "left",
         "leave", "kept", "keep", "told", "tell", "sat", "sit", "ran",
         "run", "paid", "pay", "sent", "send", "knew", "know"}

_CHUNK_HEAD_TAGS = {"NOUN", "PROPN", "PRON"}
_CHUNK_MOD_TAGS = {"DET", "ADJ", "NUM", "NOUN", "PROPN"}


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def _tag(word: str, position: int) -> str:
    low = word.lower()
    if not any(ch.isalnum() for ch in word):
        return "PUNCT"
    if word.isdigit():
        return "NUM"
    if low in _DETS:
        return "DET"
    if low in _AUX:
        return "AUX"
    if low in _PRON:
        return "PRON"
    if low in _ADP:
        return "ADP"
    if low in _CCONJ:
        return "CCONJ"
    if low in _PART:
        return "PART"
    if low in _ADV or (low.endswith("ly") and len(low) > 3):
        return "ADV"
    if low in _ADJ or low.endswith(_ADJ_SUFFIXES):
        return "ADJ"
    if low in _VERB or (len(low) > 4 and low.endswith(("ing", "ed"))):
        return "VERB"
    if position > 0 and word[:1].isupper():
        return "PROPN"
    return "NOUN"


def _noun_chunks(tags: list[str]) -> list[tuple[int, int]]:
    spans = []
    i, n = 0, len(tags)
    while i < n:
        if tags[i] in _CHUNK_MOD_TAGS or tags[i] in _CHUNK_HEAD_TAGS:
            j = i
            while j < n and (tags[j] in _CHUNK_MOD_TAGS
                             or tags[j] in _CHUNK_HEAD_TAGS):
                j += 1
            heads = [k for k in range(i, j) if tags[k] in _CHUNK_HEAD_TAGS]
            if heads:
                spans.append((i, heads[-1] + 1))
            i = j
        else:
            i += 1
    return spans


class HeuristicBackend:
    """Deterministic rule-based tagger and shallow dependency attacher.

    Closed-class lexicons plus suffix heuristics assign coarse POS
    tags; noun chunks are maximal modifier+noun runs; the first verb
    (else first auxiliary, else the rightmost noun) becomes the root,
    chunk heads attach to it as subject/object or to an immediately
    preceding adposition, and everything else hangs off the root. The
    output is always a valid single-rooted tree.
    """

    model_id = "heuristic-rules"
    model_version = "1.0.0"

    def parse(self, text: str) -> ParsedSentence:
        return self.parse_tokens(tokenize(text))

    def parse_tokens(self, tokens: list[str]) -> ParsedSentence:
        if not tokens:
            raise ParseFailure("no tokens")
        n = len(tokens)
        tags = [_tag(w, i) for i, w in enumerate(tokens)]
        chunks = _noun_chunks(tags)
        chunk_heads = {end - 1 for _, end in chunks}
        in_chunk = [False] * n
        for start, end in chunks:
            for k in range(start, end):
                in_chunk[k] = True

        root = next((i for i, t in enumerate(tags) if t == "VERB"), None)
        if root is None:
            root = next((i for i, t in enumerate(tags) if t == "AUX"), None)
        if root is None:
            nouns = [i for i, t in enumerate(tags) if t in _CHUNK_HEAD_TAGS]
            root = nouns[-1] if nouns else 0
        root_is_noun = tags[root] in _CHUNK_HEAD_TAGS

        heads = [0] * n
        rels = ["dep"] * n
        heads[root] = 0
        rels[root] = "ROOT"

        for start, end in chunks:
            head = end - 1
            for k in range(start, end - 1):
                heads[k] = head + 1
                rels[k] = {"DET": "det", "ADJ": "amod",
                           "NUM": "nummod"}.get(tags[k], "compound")
            if head == root:
                continue
            if start > 0 and tags[start - 1] == "ADP":
                heads[head] = start
                rels[head] = "pobj"
            elif root_is_noun:
                heads[head] = root + 1
                rels[head] = "conj"
            elif head < root:
                heads[head] = root + 1
                rels[head] = "nsubj"
            else:
                heads[head] = root + 1
                rels[head] = "attr" if tags[root] == "AUX" else "dobj"

        for i in range(n):
            if i == root or in_chunk[i]:
                continue
            tag = tags[i]
            if tag == "ADP":
                heads[i], rels[i] = root + 1, "prep"
            elif tag == "AUX":
                heads[i], rels[i] = root + 1, "aux"
            elif tag == "ADV":
                if i + 1 < n and tags[i + 1] in ("ADJ", "ADV"):
                    heads[i], rels[i] = i + 2, "advmod"
                else:
                    heads[i], rels[i] = root + 1, "advmod"
            elif tag == "ADJ":
                heads[i], rels[i] = root + 1, "acomp"
            elif tag == "PART":
                heads[i], rels[i] = root + 1, "neg"
            elif tag == "CCONJ":
                heads[i], rels[i] = root + 1, "cc"
            elif tag == "PUNCT":
                heads[i], rels[i] = root + 1, "punct"
            elif tag == "VERB":
                heads[i], rels[i] = root + 1, "conj"
            else:
                heads[i], rels[i] = root + 1, "dep"

        parsed = [ParsedToken(surface=w, lemma=w.lower(), upos=tags[i],
                              head=heads[i], deprel=rels[i])
                  for i, w in enumerate(tokens)]
        return ParsedSentence(tokens=parsed, chunk_spans=chunks)


class SpacyBackend:
    """Industrial parser backend; requires the spaCy package + model."""

    def __init__(self, model: str = "en_core_web_sm"):
        import spacy
        self._nlp = spacy.load(model)
        self.model_id = model
        self.model_version = str(self._nlp.meta.get("version", "unknown"))

    def parse(self, text: str) -> ParsedSentence:
        return self._convert(self._nlp(text))

    def parse_tokens(self, tokens: list[str]) -> ParsedSentence:
        if not tokens:
            raise ParseFailure("no tokens")
        from spacy.tokens import Doc
        doc = Doc(self._nlp.vocab, words=tokens)
        for _, proc in self._nlp.pipeline:
            doc = proc(doc)
        return self._convert(doc)

    def _convert(self, doc) -> ParsedSentence:
        if len(doc) == 0:
            raise ParseFailure("no tokens")
        parsed = []
        for tok in doc:
            head = 0 if tok.head is tok else tok.head.i + 1
            parsed.append(ParsedToken(surface=tok.text, lemma=tok.lemma_,
                                      upos=tok.pos_, head=head,
                                      deprel=tok.dep_.lower()))
        chunks = [(c.start, c.end) for c in doc.noun_chunks]
        return ParsedSentence(tokens=parsed, chunk_spans=chunks)


def get_backend(name: str = "auto") -> ParserBackend:
    """Resolve a backend by name: ``spacy``, ``heuristic``, or ``auto``.

    ``auto`` uses spaCy when it is importable with its default model,
    otherwise the built-in heuristic backend.
    """
    if name == "heuristic":
        return HeuristicBackend()
    if name == "spacy":
        return SpacyBackend()
    if name == "auto":
        try:
            return SpacyBackend()
        except Exception:
            return HeuristicBackend()
    raise ValueError(f"unknown backend: {name!r}")
