"""Instruction selection toolkit: per-record metrics, rank normalization,
clustering, and budgeted selection over multi-model response corpora."""

from ._core import (
    InstructionRecord,
    IoError,
    ModelCatalog,
    ModelInfo,
    RemoteError,
    ResponseEntry,
    ScoreRow,
    ValidationError,
    Weights,
    __version__,
    aggregate,
    balanced_select,
    choose_response,
    difficulty,
    embed_texts,
    fnv1a64,
    kmeans,
    minmax,
    normalize_column,
    quantile_transform,
    random_sample,
    rank_vector,
    score_dataset,
    separability,
    spearman,
    stability,
    top_k,
    zscore,
)

__all__ = [
    "InstructionRecord",
    "IoError",
    "ModelCatalog",
    "ModelInfo",
    "RemoteError",
    "ResponseEntry",
    "ScoreRow",
    "ValidationError",
    "Weights",
    "__version__",
    "aggregate",
    "balanced_select",
    "choose_response",
    "difficulty",
    "embed_texts",
    "fnv1a64",
    "kmeans",
    "minmax",
    "normalize_column",
    "quantile_transform",
    "random_sample",
    "rank_vector",
    "score_dataset",
    "separability",
    "spearman",
    "stability",
    "top_k",
    "zscore",
]
