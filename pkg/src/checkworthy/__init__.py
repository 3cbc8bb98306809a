"""Sentence-level check-worthiness scoring and ranking for English and Arabic."""

from .text_pipeline import (
    Language,
    Sentence,
    Token,
    UposTag,
    detect_language,
    pos_tag,
    segment_arabic,
    split_sentences,
    tokenize,
)
from .model import SOURCES
from .pipeline import PipelineConfig, ScoredDocument, Scorer, train_pipeline
from .bundle import ModelArtifacts, load_bundle, save_bundle

__version__ = "0.1.0"

__all__ = [
    "Language",
    "Sentence",
    "Token",
    "UposTag",
    "detect_language",
    "split_sentences",
    "tokenize",
    "segment_arabic",
    "pos_tag",
    "SOURCES",
    "Scorer",
    "ScoredDocument",
    "PipelineConfig",
    "train_pipeline",
    "ModelArtifacts",
    "save_bundle",
    "load_bundle",
    "__version__",
]
