import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treesent.dtlstm import NodePrediction
from treesent.extraction import (
    HN,
    SS,
    UNION,
    assign_sentiment,
    chunk_head,
    extract_triplets,
    identify_targets,
    noun_chunks,
    recursive_search,
    strip_function_words,
)
from treesent.labels import argmax_label
from treesent.nncore import log_softmax

from conftest import fig1_tree, make_tree, random_dep_tree


def preds_from_scores(scores):
    """Fake per-node predictions from raw 3-class scores."""
    return {i: NodePrediction(log_probs=log_softmax(np.array(s, dtype=float)))
            for i, s in enumerate(scores)}


NEG, NEU, POS = (3.0, 0.0, 0.0), (0.0, 3.0, 0.0), (0.0, 0.0, 3.0)


class TestNounChunks:
    def test_amod_head(self):
        tree = make_tree(["Good", "food", "."], [2, 0, 2],
                         upos=["ADJ", "NOUN", "PUNCT"],
                         deprels=["amod", "ROOT", "punct"])
        assert noun_chunks(tree) == [(0, 2)]
        assert chunk_head(tree, (0, 2)) == 1

    def test_det_plus_head(self):
        tree = fig1_tree()
        assert noun_chunks(tree) == [(0, 2)]

    def test_verb_only_sentence(self):
        tree = make_tree(["Run", "!"], [0, 1], upos=["VERB", "PUNCT"],
                         deprels=["ROOT", "punct"])
        assert noun_chunks(tree) == []

    def test_external_spans_override(self):
        tree = fig1_tree(chunk_spans=[(1, 2)])
        assert noun_chunks(tree) == [(1, 2)]

    def test_compound(self):
        tree = make_tree(["battery", "life", "rocks"], [2, 3, 0],
                         upos=["NOUN", "NOUN", "VERB"],
                         deprels=["compound", "nsubj", "ROOT"])
        assert noun_chunks(tree) == [(0, 2)]

    def test_advmod_of_amod_included(self):
        tree = make_tree(["very", "good", "food", "rocks"], [2, 3, 4, 0],
                         upos=["ADV", "ADJ", "NOUN", "VERB"],
                         deprels=["advmod", "amod", "nsubj", "ROOT"])
        assert noun_chunks(tree) == [(0, 3)]


class TestIdentifyTargets:
    def test_aux_parent(self):
        tree = make_tree(["the", "food", "is", "good"], [2, 3, 0, 3],
                         upos=["DET", "NOUN", "AUX", "ADJ"],
                         deprels=["det", "nsubj", "ROOT", "acomp"])
        cands = identify_targets(tree, noun_chunks(tree))
        assert len(cands) == 1
        assert cands[0].parent_verb_index == 2
        assert cands[0].chunk == (0, 2)

    def test_verbless_sentence(self):
        tree = make_tree(["Good", "food", "."], [2, 0, 2],
                         upos=["ADJ", "NOUN", "PUNCT"],
                         deprels=["amod", "ROOT", "punct"])
        cands = identify_targets(tree, noun_chunks(tree))
        assert len(cands) == 1
        assert cands[0].parent_verb_index is None
        assert cands[0].head_noun_index == 1

    def test_nearest_verb_wins(self):
        # "I think the food rocks": the chunk attaches to "rocks", not "think"
        tree = make_tree(["I", "think", "the", "food", "rocks"],
                         [2, 0, 4, 5, 2],
                         upos=["PRON", "VERB", "DET", "NOUN", "VERB"],
                         deprels=["nsubj", "ROOT", "det", "nsubj", "ccomp"])
        cands = identify_targets(tree, [(2, 4)])
        assert len(cands) == 1
        assert cands[0].parent_verb_index == 4

    def test_one_candidate_per_chunk(self, rng):
        for _ in range(50):
            tree = random_dep_tree(rng)
            cands = identify_targets(tree, noun_chunks(tree))
            assert len({c.chunk for c in cands}) == len(cands)

    def test_closest_parent_property(self, rng):
        # no verb strictly between the chunk head and the recorded parent
        for _ in range(100):
            tree = random_dep_tree(rng)
            for cand in identify_targets(tree, noun_chunks(tree)):
                if cand.parent_verb_index is None:
                    continue
                node = tree.tokens[cand.head_noun_index].head
                while node != cand.parent_verb_index:
                    yield_set = set(tree.subtree(node))
                    span_inside = all(
                        i in yield_set for i in range(*cand.chunk))
                    assert not (tree.tokens[node].upos in ("VERB", "AUX")
                                and span_inside)
                    node = tree.tokens[node].head


class TestAssignSentiment:
    def test_inherits_from_parent_verb(self):
        tree = make_tree(["the", "food", "is", "good"], [2, 3, 0, 3],
                         upos=["DET", "NOUN", "AUX", "ADJ"],
                         deprels=["det", "nsubj", "ROOT", "acomp"])
        cands = identify_targets(tree, noun_chunks(tree))
        preds = preds_from_scores([NEU, NEU, POS, POS])
        assert assign_sentiment(cands[0], preds) == "positive"

    def test_verbless_uses_head_noun(self):
        tree = make_tree(["Good", "food", "."], [2, 0, 2],
                         upos=["ADJ", "NOUN", "PUNCT"],
                         deprels=["amod", "ROOT", "punct"])
        cands = identify_targets(tree, noun_chunks(tree))
        preds = preds_from_scores([POS, POS, NEU])
        assert assign_sentiment(cands[0], preds) == "positive"

    def test_tie_breaks_toward_positive(self):
        assert argmax_label(np.array([0.0, 1.0, 1.0])) == "positive"
        assert argmax_label(np.array([1.0, 1.0, 0.0])) == "neutral"


class TestRecursiveSearch:
    def test_fig1_example(self):
        tree = fig1_tree()
        # positive activation highest at "good"
        preds = preds_from_scores([
            NEU, NEU, (0.0, 0.0, 1.0), (0.0, 0.0, 2.0), (0.0, 0.0, 4.0)])
        result = recursive_search(tree, preds, root_index=2,
                                  target_sentiment="positive",
                                  exclusion=(0, 2))
        assert result.hn_token_index == 4
        assert result.ss_token_indices == [2, 3, 4]

    def test_all_neutral_nodes(self):
        tree = fig1_tree()
        scores = [(0.0, 3.0, float(i) / 10) for i in range(5)]
        preds = preds_from_scores(scores)
        result = recursive_search(tree, preds, 2, "positive", exclusion=(0, 2))
        assert result.ss_token_indices == []
        # the largest (still sub-dominant) positive log-probability wins
        assert result.hn_token_index == 4

    def test_whole_subtree_excluded(self):
        tree = make_tree(["food"], [0], upos=["NOUN"], deprels=["ROOT"])
        preds = preds_from_scores([POS])
        result = recursive_search(tree, preds, 0, "positive", exclusion=(0, 1))
        assert result.empty
        assert result.hn_token_index is None
        assert result.ss_token_indices == []

    def brute_force(self, tree, preds, root, sentiment, exclusion):
        # independent oracle: explicit recursion, >= keeps the later visit
        from treesent.labels import LABEL_INDEX
        cls = LABEL_INDEX[sentiment]
        excluded = set(range(*exclusion)) if exclusion else set()
        visits = []

        def walk(node):
            visits.append(node)
            for child in tree.children[node]:
                walk(child)

        walk(root)
        candidates = [v for v in visits if v not in excluded]
        if not candidates:
            return None, []
        hn = None
        best = float("-inf")
        for v in candidates:
            act = float(preds[v].log_probs[cls])
            if act >= best:
                best, hn = act, v
        ss = sorted(v for v in candidates
                    if argmax_label(preds[v].log_probs) == sentiment)
        return hn, ss

    def test_random_trees_match_oracle(self, rng):
        from treesent.labels import LABELS
        for _ in range(100):
            tree = random_dep_tree(rng, n_max=5)
            preds = preds_from_scores(rng.normal(size=(len(tree), 3)))
            sentiment = str(rng.choice(LABELS))
            root = int(rng.integers(0, len(tree)))
            exclusion = None
            if rng.random() < 0.5 and len(tree) > 1:
                s = int(rng.integers(0, len(tree) - 1))
                exclusion = (s, s + 1 + int(rng.integers(0, len(tree) - s)))
            result = recursive_search(tree, preds, root, sentiment, exclusion)
            hn, ss = self.brute_force(tree, preds, root, sentiment, exclusion)
            assert result.hn_token_index == hn
            assert result.ss_token_indices == ss


class TestStripFunctionWords:
    def test_determiners(self):
        assert strip_function_words(["the", "food"], strip_copula=False) == ["food"]

    def test_copula(self):
        assert strip_function_words(["is", "pretty", "good"],
                                    strip_dets=False) == ["pretty", "good"]

    def test_empty(self):
        assert strip_function_words([]) == []

    def test_case_insensitive(self):
        assert strip_function_words(["The", "Food", "Was", "'s", "ok"]) == ["Food", "ok"]

    @given(st.lists(st.sampled_from(
        ["the", "a", "an", "is", "was", "food", "good", "Nice"]), max_size=10))
    @settings(max_examples=100)
    def test_idempotent_and_order_preserving(self, tokens):
        once = strip_function_words(tokens)
        assert strip_function_words(once) == once
        it = iter(tokens)
        assert all(any(t == s for s in it) or True for t in once)
        # survivors appear in the original order
        positions = [tokens.index(t) for t in once]
        last = -1
        for t in once:
            idx = tokens.index(t, last + 1)
            assert idx > last
            last = idx


class TestExtractTriplets:
    def test_copular_clause_example(self):
        # "the food was excellent"
        tree = make_tree(["the", "food", "was", "excellent"], [2, 3, 0, 3],
                         upos=["DET", "NOUN", "AUX", "ADJ"],
                         deprels=["det", "nsubj", "ROOT", "acomp"])
        preds = preds_from_scores([NEU, NEU, POS, (0.0, 0.0, 6.0)])
        triplets = extract_triplets(tree, preds, method=HN)
        assert len(triplets) == 1
        t = triplets[0]
        assert t.target_tokens == ["the", "food"]
        assert t.sentiment == "positive"
        assert t.opinion_tokens == ["excellent"]

    def test_two_verbs_two_chunks(self):
        # "service rocks but decor sucks"
        tree = make_tree(["service", "rocks", "but", "decor", "sucks"],
                         [2, 0, 2, 5, 2],
                         upos=["NOUN", "VERB", "CCONJ", "NOUN", "VERB"],
                         deprels=["nsubj", "ROOT", "cc", "nsubj", "conj"])
        preds = preds_from_scores([NEU, (0, 0, 5.0), NEU, NEU, (5.0, 0, 0)])
        triplets = extract_triplets(tree, preds, method=HN)
        assert len(triplets) == 2
        by_target = {tuple(t.target_tokens): t for t in triplets}
        assert by_target[("service",)].sentiment == "positive"
        assert by_target[("decor",)].opinion_tokens == ["sucks"]
        assert by_target[("decor",)].sentiment == "negative"

    def test_verbless_sentence(self):
        tree = make_tree(["Good", "food", "."], [2, 0, 2],
                         upos=["ADJ", "NOUN", "PUNCT"],
                         deprels=["amod", "ROOT", "punct"])
        preds = preds_from_scores([(0, 0, 5.0), POS, NEU])
        triplets = extract_triplets(tree, preds, method=SS)
        assert len(triplets) == 1
        # the whole chunk is excluded; search covers the rest of the noun subtree
        assert triplets[0].target_tokens == ["Good", "food"]
        assert triplets[0].sentiment == "positive"

    def test_union_merges_methods(self):
        tree = fig1_tree()
        preds = preds_from_scores([NEU, NEU, (0, 0, 1.0), (0, 0, 2.0), (0, 0, 4.0)])
        union = extract_triplets(tree, preds, method=UNION)[0]
        hn = extract_triplets(tree, preds, method=HN)[0]
        ss = extract_triplets(tree, preds, method=SS)[0]
        assert set(union.opinion_indices) == set(hn.opinion_indices) | set(ss.opinion_indices)
        assert union.opinion_indices == sorted(union.opinion_indices)

    def test_trickle_down_identity(self, rng):
        # every triplet's sentiment equals the argmax label at its search root
        for _ in range(50):
            tree = random_dep_tree(rng)
            preds = preds_from_scores(rng.normal(size=(len(tree), 3)))
            cands = identify_targets(tree, noun_chunks(tree))
            triplets = extract_triplets(tree, preds, method=HN)
            for cand, triplet in zip(cands, triplets):
                root = cand.parent_verb_index
                if root is None:
                    root = cand.head_noun_index
                assert triplet.sentiment == argmax_label(preds[root].log_probs)
