"""Offline corpus preparation.

Three batch conversions, each emitting files in the formats the
downstream extraction library reads, plus a provenance manifest:

- :func:`parse_corpus` — raw sentences to enriched CoNLL-U with noun
  chunks marked as MISC ``Chunk=B/I``;
- :func:`convert_sst` — a sentiment-treebank release to the parallel
  ``toks`` / ``parents`` / ``labels`` layout;
- :func:`convert_gold` — public ``####``-annotated triplet files to
  normalized JSON-lines gold records.
"""

from .backends import (HeuristicBackend, ParsedSentence, ParsedToken,
                       ParseFailure, SpacyBackend, get_backend)
from .manifest import PrepManifest
from .parse import format_conllu_block, parse_corpus
from .sst import SstConversionError, bucket_sentiment, convert_sst
from .gold import convert_gold

__all__ = [
    "HeuristicBackend", "ParsedSentence", "ParsedToken", "ParseFailure",
    "SpacyBackend", "get_backend", "PrepManifest", "format_conllu_block",
    "parse_corpus", "SstConversionError", "bucket_sentiment", "convert_sst",
    "convert_gold",
]
