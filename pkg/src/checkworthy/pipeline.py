"""End-to-end orchestration: training a bundle from a corpus, and scoring
text or debates with a trained one.

The Scorer counts how many sentences it has featurized
(`featurize_calls`); cached session reads in the HTTP service must leave
that counter untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import ranking
from .bundle import ModelArtifacts
from .corpus import Debate, label_for, labels_and_mask
from .embeddings import EmbeddingConfig
from .errors import EmptyDataset, UnknownSource
from .features import (
    FeatureLayout,
    FeatureResources,
    SentenceContext,
    build_corpus_stats,
    default_lexicons,
    featurize_sentence,
    fit_scaler,
    terms_of,
)
from .model import DEFAULT_HIDDEN, SOURCES, TrainConfig, forward, train_sgd
from .ranking import Metrics, RankedList
from .text_pipeline import Language, Sentence, pos_tag, split_sentences, tokenize
from .topics import lda_fit


@dataclass
class PipelineConfig:
    tfidf_buckets: int = 1000
    topic_count: int = 30
    lda_alpha: float | None = None  # defaults to 50/K
    lda_beta: float = 0.01
    lda_iterations: int = 500
    lda_infer_iterations: int = 50
    lda_seed: int = 7
    lda_infer_seed: int = 13
    epochs: int = 100
    learning_rate: float = 0.01
    seed: int = 0
    hidden: tuple[int, int] = DEFAULT_HIDDEN
    shuffle: bool = True


def _contexts_for_debate(debate: Debate) -> list[SentenceContext]:
    n = len(debate.sentences)
    contexts = []
    for i, sentence in enumerate(debate.sentences):
        tokens = tokenize(sentence.text, debate.language)
        upos = pos_tag(tokens, debate.language)
        contexts.append(
            SentenceContext(tokens=tokens, upos=upos, index=i, n_sentences=n, language=debate.language)
        )
    return contexts


def train_pipeline(
    train_debates: Sequence[Debate],
    emb_config: EmbeddingConfig,
    config: PipelineConfig | None = None,
    base_dir: str | None = None,
) -> ModelArtifacts:
    """Fit corpus statistics, the topic model, the feature scaler, and the
    network on the given debates; returns a persistable artifact set."""
    config = config or PipelineConfig()
    if not train_debates:
        raise EmptyDataset("no training debates")

    tables = emb_config.resolve(base_dir)
    contexts = []
    labelled = []
    for debate in train_debates:
        debate_contexts = _contexts_for_debate(debate)
        contexts.extend(debate_contexts)
        labelled.extend(debate.sentences)

    stats = build_corpus_stats([ctx.tokens for ctx in contexts], bucket_count=config.tfidf_buckets)
    lda = lda_fit(
        [terms_of(ctx.tokens) for ctx in contexts],
        k=config.topic_count,
        alpha=config.lda_alpha,
        beta=config.lda_beta,
        iterations=config.lda_iterations,
        seed=config.lda_seed,
    )
    layout = FeatureLayout(
        tfidf_buckets=config.tfidf_buckets,
        embedding_dim=emb_config.dim,
        topic_count=config.topic_count,
    )
    resources = FeatureResources(
        layout=layout,
        stats=stats,
        lexicons=default_lexicons(),
        embeddings=tables,
        lda=lda,
        lda_infer_iterations=config.lda_infer_iterations,
        lda_infer_seed=config.lda_infer_seed,
    )

    raw = np.stack([featurize_sentence(ctx, resources).values for ctx in contexts])
    scaler = fit_scaler(raw)
    scaled = scaler.transform(raw)

    dataset = []
    for row, sentence in zip(scaled, labelled):
        y, mask = labels_and_mask(sentence)
        dataset.append((row, y, mask))

    result = train_sgd(
        dataset,
        TrainConfig(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            seed=config.seed,
            shuffle=config.shuffle,
        ),
        layout=layout,
        scaler=scaler,
        hidden=config.hidden,
    )
    return ModelArtifacts(model=result.model, stats=stats, lda=lda, emb_config=emb_config)


@dataclass
class ScoredDocument:
    language: Language
    sentences: list[Sentence]
    matrix: np.ndarray  # (n_sources, n_sentences)
    sources: tuple[str, ...] = SOURCES

    def scores_for(self, source: str) -> list[float]:
        try:
            row = self.sources.index(source)
        except ValueError:
            raise UnknownSource(f"unknown source: {source!r}") from None
        return [float(v) for v in self.matrix[row]]

    def ranked(self, source: str) -> RankedList:
        return ranking.rank(self.scores_for(source))


class Scorer:
    """Scores text with a trained artifact set; immutable after init and
    safe to share across threads."""

    def __init__(self, artifacts: ModelArtifacts, lexicons=None):
        self.artifacts = artifacts
        tables = artifacts.emb_config.resolve(artifacts.base_dir)
        self.resources = FeatureResources(
            layout=artifacts.model.layout,
            stats=artifacts.stats,
            lexicons=lexicons if lexicons is not None else default_lexicons(),
            embeddings=tables,
            lda=artifacts.lda,
        )
        self.featurize_calls = 0

    @property
    def sources(self) -> tuple[str, ...]:
        return self.artifacts.model.sources

    def _score_contexts(self, contexts: Sequence[SentenceContext]) -> np.ndarray:
        model = self.artifacts.model
        matrix = np.zeros((len(model.sources), len(contexts)))
        for j, ctx in enumerate(contexts):
            self.featurize_calls += 1
            raw = featurize_sentence(ctx, self.resources).values
            scaled = model.scaler.transform(raw)
            matrix[:, j] = forward(model, scaled)
        return matrix

    def score_text(self, text: str, language: Language | None = None) -> ScoredDocument:
        from .text_pipeline import detect_language

        lang = language if language is not None else detect_language(text)
        sentences = split_sentences(text, lang)
        contexts = []
        for sentence in sentences:
            tokens = tokenize(sentence.text, lang)
            upos = pos_tag(tokens, lang)
            contexts.append(
                SentenceContext(
                    tokens=tokens, upos=upos, index=sentence.index,
                    n_sentences=len(sentences), language=lang,
                )
            )
        matrix = self._score_contexts(contexts)
        return ScoredDocument(language=lang, sentences=sentences, matrix=matrix, sources=self.sources)

    def score_debate(self, debate: Debate) -> np.ndarray:
        return self._score_contexts(_contexts_for_debate(debate))


def evaluate_debates(scorer: Scorer, debates: Sequence[Debate], source: str = "Any", ks=ranking.DEFAULT_KS) -> Metrics:
    """Rank each debate's sentences by the source's score and evaluate the
    induced binary-label lists."""
    ranked_label_lists = []
    row = scorer.sources.index(source) if source in scorer.sources else None
    if row is None:
        raise UnknownSource(f"unknown source: {source!r}")
    for debate in debates:
        matrix = scorer.score_debate(debate)
        order = ranking.rank([float(v) for v in matrix[row]]).order
        labels = [label_for(debate.sentences[i], source) for i in order]
        ranked_label_lists.append(labels)
    return ranking.evaluate(ranked_label_lists, ks=ks)
