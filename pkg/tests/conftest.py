"""Shared fixtures: synthetic corpora, synthetic embedding tables, and a
small trained artifact set reused by pipeline/service/CLI tests."""

from __future__ import annotations

import re

import numpy as np
import pytest

from checkworthy.bundle import ModelArtifacts
from checkworthy.corpus import SynthConfig, generate_synthetic
from checkworthy.embeddings import EmbeddingConfig, EmbeddingTable, save_embeddings
from checkworthy.pipeline import PipelineConfig, train_pipeline
from checkworthy.text_pipeline import Language

_WORD_RE = re.compile(r"[A-Za-z]+")


def corpus_vocabulary(debates) -> list[str]:
    """Lowercased alphabetic vocabulary of a synthetic corpus, sorted."""
    vocab = set()
    for debate in debates:
        for sentence in debate.sentences:
            vocab.update(w.lower() for w in _WORD_RE.findall(sentence.text))
    return sorted(vocab)


def synthetic_embeddings(
    words: list[str],
    dim: int = 50,
    seed: int = 11,
    cluster_prefix: str = "zu",
    language: Language = Language.ENGLISH,
) -> EmbeddingTable:
    """Random unit-scale vectors; words sharing `cluster_prefix` (the
    planted markers) cluster around a common direction so the embedding
    segment carries a learnable signal."""
    rng = np.random.Generator(np.random.PCG64(seed))
    center = rng.normal(size=dim)
    center /= np.linalg.norm(center)
    vectors = {}
    for word in words:
        noise = rng.normal(size=dim) * 0.15
        if word.startswith(cluster_prefix):
            vectors[word] = 2.0 * center + noise
        else:
            vectors[word] = rng.normal(size=dim)
    return EmbeddingTable(dim=dim, vectors=vectors, language=language)


@pytest.fixture(scope="session")
def synth_corpus():
    return generate_synthetic(SynthConfig(n_debates=7, sentences_per=150, prevalence=0.15, seed=42))


@pytest.fixture(scope="session")
def tiny_corpus():
    return generate_synthetic(SynthConfig(n_debates=3, sentences_per=12, prevalence=0.3, seed=5))


@pytest.fixture(scope="session")
def tiny_artifacts(tiny_corpus, tmp_path_factory) -> ModelArtifacts:
    """A fast, small trained artifact set (not meant to rank well)."""
    base = tmp_path_factory.mktemp("tiny")
    table = synthetic_embeddings(corpus_vocabulary(tiny_corpus), dim=16)
    vec_path = base / "tiny.vec"
    save_embeddings(table, vec_path)
    emb_config = EmbeddingConfig(dim=16, primary_path=str(vec_path))
    config = PipelineConfig(
        tfidf_buckets=64,
        topic_count=4,
        lda_iterations=30,
        lda_infer_iterations=10,
        epochs=4,
        hidden=(12, 6),
        seed=1,
    )
    return train_pipeline(tiny_corpus, emb_config, config)
