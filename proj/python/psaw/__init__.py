"""Learn fully interpretable regular-expression text classifiers.

The heavy lifting lives in the compiled `_core` extension; this package
re-exports its public surface.
"""

from ._core import (
    AnnealConfig,
    BinaryDataset,
    Classifier,
    ConfigError,
    ConfusionCounts,
    DataError,
    Document,
    EmbeddingTable,
    EvalMetrics,
    HistoryRecord,
    LabeledCorpus,
    OovError,
    RegexRule,
    TrainError,
    TrainResult,
    build_fallback_embeddings,
    cosine_similarity,
    decode,
    evaluate,
    generate_synthetic_corpus,
    load_classifier,
    load_corpus,
    load_embeddings,
    match_rule,
    rule_from_canonical,
    rule_to_canonical,
    save_classifier,
    save_corpus,
    split_binary,
    tokenize,
    train,
)

__all__ = [
    "AnnealConfig",
    "BinaryDataset",
    "Classifier",
    "ConfigError",
    "ConfusionCounts",
    "DataError",
    "Document",
    "EmbeddingTable",
    "EvalMetrics",
    "HistoryRecord",
    "LabeledCorpus",
    "OovError",
    "RegexRule",
    "TrainError",
    "TrainResult",
    "build_fallback_embeddings",
    "cosine_similarity",
    "decode",
    "evaluate",
    "generate_synthetic_corpus",
    "load_classifier",
    "load_corpus",
    "load_embeddings",
    "match_rule",
    "rule_from_canonical",
    "rule_to_canonical",
    "save_classifier",
    "save_corpus",
    "split_binary",
    "tokenize",
    "train",
]

__version__ = "0.1.0"
