"""Symbolic layer: noun chunking, target identification, trickle-down
sentiment, and the recursive opinion-term search (highest-node and
sentiment-search variants)."""

from __future__ import annotations

from dataclasses import dataclass, field

from treesent.corpus import DepTree, ROOT
from treesent.labels import LABEL_INDEX, argmax_label

# POS tags that can head a noun chunk, and the dependency relations a
# chunk head may carry.
CHUNK_HEAD_POS = {"NOUN", "PROPN", "PRON"}
CHUNK_HEAD_DEPRELS = {
    "nsubj", "nsubjpass", "dobj", "iobj", "pobj", "attr", "dative",
    "appos", "conj", "root",
}
# Relations that pull left-side dependents into the chunk.
CHUNK_MODIFIER_DEPRELS = {"det", "poss", "amod", "compound", "nummod"}

VERB_POS = {"VERB", "AUX"}

DETERMINERS = {"the", "a", "an"}
COPULAS = {"is", "was", "were", "are", "'s"}

HN = "HN"
SS = "SS"
UNION = "UNION"
METHODS = (HN, SS, UNION)


@dataclass
class TargetCandidate:
    chunk: tuple[int, int]              # half-open token span
    head_noun_index: int
    parent_verb_index: int | None       # None in verbless sentences
    sentiment: str | None = None


@dataclass
class SearchResult:
    hn_token_index: int | None
    hn_activation: float
    ss_token_indices: list[int]
    empty: bool = False                 # whole subtree was excluded


@dataclass
class Triplet:
    target_span: tuple[int, int]
    target_tokens: list[str]
    sentiment: str
    opinion_indices: list[int]
    opinion_tokens: list[str]
    method: str


def noun_chunks(tree: DepTree) -> list[tuple[int, int]]:
    """Noun-chunk spans for a sentence.

    Externally supplied spans (``tree.chunk_spans``) win. Otherwise a
    chunk is built around each noun-ish head with an allowed relation:
    the span runs from the leftmost left-side modifier (determiners,
    possessives, adjectives, compounds, numerals, plus adverbs that
    modify one of the chunk's adjectives) to the head, inclusive.
    Overlaps are merged in favour of the longer chunk.
    """
    if tree.chunk_spans is not None:
        return list(tree.chunk_spans)
    spans = []
    for head, tok in enumerate(tree.tokens):
        if tok.upos not in CHUNK_HEAD_POS:
            continue
        if tok.deprel.lower() not in CHUNK_HEAD_DEPRELS:
            continue
        leftmost = head
        frontier = [head]
        while frontier:
            node = frontier.pop()
            for dep in tree.children[node]:
                if dep >= head:
                    continue
                rel = tree.tokens[dep].deprel.lower()
                if node == head and rel in CHUNK_MODIFIER_DEPRELS:
                    leftmost = min(leftmost, dep)
                    frontier.append(dep)
                elif rel == "advmod" and tree.tokens[node].deprel.lower() == "amod":
                    leftmost = min(leftmost, dep)
        spans.append((leftmost, head + 1))
    # Merge overlaps, longer chunk wins; equal lengths keep the earlier one.
    spans.sort(key=lambda s: (-(s[1] - s[0]), s[0]))
    kept = []
    for span in spans:
        if all(span[1] <= other[0] or span[0] >= other[1] for other in kept):
            kept.append(span)
    return sorted(kept)


def chunk_head(tree: DepTree, span: tuple[int, int]) -> int:
    """The token inside the span whose parent lies outside it (rightmost
    such token, since English noun chunks are head-final)."""
    start, end = span
    heads = [i for i in range(start, end)
             if tree.tokens[i].head == ROOT or not start <= tree.tokens[i].head < end]
    if not heads:
        return end - 1
    return heads[-1]


def identify_targets(tree: DepTree, chunks: list[tuple[int, int]]
                     ) -> list[TargetCandidate]:
    """Attach each noun chunk to its nearest ancestor verb/auxiliary.

    A chunk is a candidate only if it lies wholly inside that verb's
    yield; a verb may own several chunks but a chunk is emitted once.
    In a sentence with no verb at all, every chunk is a candidate rooted
    at its own head noun.
    """
    has_verb = any(t.upos in VERB_POS for t in tree.tokens)
    candidates = []
    for span in chunks:
        head = chunk_head(tree, span)
        if not has_verb:
            candidates.append(TargetCandidate(chunk=span, head_noun_index=head,
                                              parent_verb_index=None))
            continue
        node = tree.tokens[head].head
        while node != ROOT:
            if tree.tokens[node].upos in VERB_POS:
                yield_set = set(tree.subtree(node))
                if all(i in yield_set for i in range(span[0], span[1])):
                    candidates.append(TargetCandidate(
                        chunk=span, head_noun_index=head, parent_verb_index=node))
                break
            node = tree.tokens[node].head
    return candidates


def assign_sentiment(candidate: TargetCandidate, preds) -> str:
    """Trickle-down rule: the target inherits the argmax sentiment of its
    parental verb (or of its own head noun when there is none)."""
    node = candidate.parent_verb_index
    if node is None:
        node = candidate.head_noun_index
    label = argmax_label(preds[node].log_probs)
    candidate.sentiment = label
    return label


def recursive_search(tree: DepTree, preds, root_index: int,
                     target_sentiment: str,
                     exclusion: tuple[int, int] | None = None) -> SearchResult:
    """Depth-first search of the subtree under ``root_index``.

    HN is the visited node with the maximum log-softmax value for the
    target class (later-visited wins ties); SS is every visited node
    whose argmax class equals the target sentiment, in sentence order.
    Excluded tokens (normally the target's own chunk) are skipped as
    candidates but their subtrees are still traversed.
    """
    cls = LABEL_INDEX[target_sentiment]
    excluded = set(range(*exclusion)) if exclusion else set()

    hn = None
    hn_act = float("-inf")
    ss = []
    visited_any = False

    def visit(node):
        nonlocal hn, hn_act, visited_any
        if node not in excluded:
            visited_any = True
            act = float(preds[node].log_probs[cls])
            if act >= hn_act:
                hn_act = act
                hn = node
            if argmax_label(preds[node].log_probs) == target_sentiment:
                ss.append(node)
        for child in tree.children[node]:
            visit(child)

    visit(root_index)
    if not visited_any:
        return SearchResult(hn_token_index=None, hn_activation=float("-inf"),
                            ss_token_indices=[], empty=True)
    return SearchResult(hn_token_index=hn, hn_activation=hn_act,
                        ss_token_indices=sorted(ss))


def strip_function_words(tokens: list[str], strip_dets: bool = True,
                         strip_copula: bool = True) -> list[str]:
    """Drop determiners and/or copulas (case-insensitive); order-preserving."""
    out = []
    for tok in tokens:
        low = tok.lower()
        if strip_dets and low in DETERMINERS:
            continue
        if strip_copula and low in COPULAS:
            continue
        out.append(tok)
    return out


def extract_triplets(tree: DepTree, preds, method: str = UNION,
                     exclude_target: bool = True) -> list[Triplet]:
    """Full symbolic pipeline for one sentence: chunk, attach to verbs,
    trickle down sentiment, then search the verb's subtree for the
    opinion term with the requested method."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    surfaces = tree.surfaces()
    triplets = []
    for cand in identify_targets(tree, noun_chunks(tree)):
        sentiment = assign_sentiment(cand, preds)
        root = cand.parent_verb_index
        if root is None:
            root = cand.head_noun_index
        exclusion = cand.chunk if exclude_target else None
        result = recursive_search(tree, preds, root, sentiment, exclusion)
        if method == HN:
            opinion = [] if result.hn_token_index is None else [result.hn_token_index]
        elif method == SS:
            opinion = list(result.ss_token_indices)
        else:
            opinion = sorted(set(result.ss_token_indices)
                             | ({result.hn_token_index}
                                if result.hn_token_index is not None else set()))
        triplets.append(Triplet(
            target_span=cand.chunk,
            target_tokens=surfaces[cand.chunk[0]:cand.chunk[1]],
            sentiment=sentiment,
            opinion_indices=opinion,
            opinion_tokens=[surfaces[i] for i in opinion],
            method=method,
        ))
    return triplets
