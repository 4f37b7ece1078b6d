"""Tree-LSTM sentiment triplet extraction.

A hybrid neural-symbolic pipeline: a child-sum dependency tree-LSTM
scores every node of a parse for 3-class sentiment, and symbolic rules
over the tree turn those scores into (target, sentiment, opinion term)
triplets. Includes the n-gram evaluation harness.
"""

from treesent.corpus import (
    ROOT,
    DepTree,
    EmbeddingTable,
    GoldRecord,
    GoldTriplet,
    SstExample,
    Token,
    load_embeddings,
    read_conllu,
    read_sst,
    read_triplet_gold,
    write_conllu,
)
from treesent.dtlstm import (
    ModelParams,
    NodePrediction,
    TrainConfig,
    init_params,
    load_checkpoint,
    node_forward,
    save_checkpoint,
    train,
    tree_forward,
)
from treesent.extraction import (
    SearchResult,
    TargetCandidate,
    Triplet,
    assign_sentiment,
    extract_triplets,
    identify_targets,
    noun_chunks,
    recursive_search,
    strip_function_words,
)
from treesent.evaluation import (
    EvalReport,
    GleuScore,
    evaluate_all,
    evaluate_sentiment,
    evaluate_targets,
    evaluate_triplets,
    gleu,
    render_report,
    span_match,
)
from treesent.labels import LABELS, NEGATIVE, NEUTRAL, POSITIVE, argmax_label

__version__ = "0.1.0"
