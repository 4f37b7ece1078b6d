import pytest

from corpusprep.backends import (HeuristicBackend, ParseFailure, get_backend,
                                 tokenize)


@pytest.fixture
def backend():
    return HeuristicBackend()


def test_tokenize_splits_punctuation_and_clitics():
    assert tokenize("The food's great!") == ["The", "food", "'s", "great", "!"]
    assert tokenize("") == []


def test_single_root_and_valid_heads(backend):
    parsed = backend.parse("The friendly staff served very fresh bread .")
    roots = [t for t in parsed.tokens if t.head == 0]
    assert len(roots) == 1
    n = len(parsed.tokens)
    for i, tok in enumerate(parsed.tokens):
        assert 0 <= tok.head <= n
        assert tok.head != i + 1  # no self-loops


def test_acyclic(backend):
    parsed = backend.parse("We went to the place on the corner twice .")
    heads = [t.head for t in parsed.tokens]
    for i in range(len(heads)):
        seen, j = set(), i
        while heads[j] != 0:
            assert j not in seen
            seen.add(j)
            j = heads[j] - 1


def test_copula_sentence_structure(backend):
    parsed = backend.parse("The food is pretty good")
    tags = [t.upos for t in parsed.tokens]
    rels = [t.deprel for t in parsed.tokens]
    assert tags == ["DET", "NOUN", "AUX", "ADV", "ADJ"]
    assert rels == ["det", "nsubj", "ROOT", "advmod", "acomp"]
    assert parsed.tokens[3].head == 5        # adverb modifies the adjective
    assert parsed.chunk_spans == [(0, 2)]


def test_chunks_cover_modifier_runs(backend):
    parsed = backend.parse("the cheap wine list surprised the waiter")
    assert parsed.chunk_spans == [(0, 4), (5, 7)]
    spans = parsed.chunk_spans
    for (a, b), (c, d) in zip(spans, spans[1:]):
        assert b <= c  # non-overlapping, in order


def test_empty_input_is_a_parse_failure(backend):
    with pytest.raises(ParseFailure):
        backend.parse("   ")
    with pytest.raises(ParseFailure):
        backend.parse_tokens([])


def test_determinism(backend):
    text = "I ordered the grilled fish and it arrived cold ."
    assert backend.parse(text) == backend.parse(text)


def test_get_backend_names():
    assert isinstance(get_backend("heuristic"), HeuristicBackend)
    assert get_backend("auto") is not None
    with pytest.raises(ValueError):
        get_backend("nonsense")
