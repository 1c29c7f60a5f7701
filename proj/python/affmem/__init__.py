"""Affect-weighted summaries and emotion search over recorded conversations."""

from ._core import (
    AffmemError,
    AffmemWarning,
    AnalysisError,
    Clustering,
    DataError,
    InvalidArgumentError,
    NotFoundError,
    QuerySyntaxError,
    SaliencePeak,
    ScoredSentence,
    SearchHit,
    Sentence,
    Session,
    Snippet,
    Store,
    StoreError,
    SummaryResult,
    UnknownChannelError,
    embed_corpus,
    format_query,
    highlights,
    kmeans,
    load_bundle,
    resample_channel,
    salience_series,
    search,
    sentence_engagement,
    summarize,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
