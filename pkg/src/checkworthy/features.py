"""Per-sentence feature vectors.

Segments, in layout order: hashed TF.IDF bag of words, mean word embedding,
Universal-POS histogram, lexicon match counts/ratios, structural features
(relative position, token count, log token count), a heuristic named-entity
count, and an LDA topic distribution.
"""

from __future__ import annotations

import logging
import math
import os
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyCorpus,
    LayoutMismatch,
    MissingResource,
    ParseError,
    TooFewSamples,
)
from .text_pipeline import UPOS_ORDER, Language, Token, UposTag, stem_of

logger = logging.getLogger(__name__)

LEXICON_NAMES: tuple[str, ...] = (
    "bias",
    "sentiment_pos",
    "sentiment_neg",
    "assertive",
    "subjective",
)

DEFAULT_TFIDF_BUCKETS = 1000

# Fixed 64-bit FNV-1a so hashed bucket assignment is platform-identical.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def stable_hash64(term: str) -> int:
    h = _FNV_OFFSET
    for byte in term.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


def terms_of(tokens: Sequence[Token]) -> list[str]:
    """Lowercased term stream: clitic segments for segmented Arabic tokens,
    token surfaces otherwise."""
    terms: list[str] = []
    for tok in tokens:
        if len(tok.segments) > 1:
            terms.extend(seg.lower() for seg in tok.segments)
        else:
            terms.append(tok.surface.lower())
    return terms


# --------------------------------------------------------------------------
# Lexicons
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Lexicon:
    name: str
    entries: Mapping[str, float]

    def weight(self, term: str) -> float | None:
        return self.entries.get(term)


def load_lexicon(path: str | os.PathLike, name: str) -> Lexicon:
    """Parse `term` or `term<TAB>weight` lines; terms are lowercased,
    duplicates keep the last weight (with a warning)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError as exc:
        raise MissingResource(f"lexicon file not found: {path}") from exc
    entries: dict[str, float] = {}
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) > 2:
            raise ParseError(f"expected 'term' or 'term<TAB>weight': {raw!r}", line=ln)
        term = parts[0].strip().lower()
        if not term:
            raise ParseError("empty term", line=ln)
        weight = 1.0
        if len(parts) == 2:
            try:
                weight = float(parts[1])
            except ValueError as exc:
                raise ParseError(f"bad weight {parts[1]!r}", line=ln) from exc
        if term in entries:
            logger.warning("lexicon %s: duplicate term %r, keeping last weight", name, term)
        entries[term] = weight
    if not entries:
        raise ParseError(f"empty lexicon: {path}")
    return Lexicon(name=name, entries=entries)


def default_lexicons() -> tuple[Lexicon, ...]:
    """The five bundled starter lexicons, in canonical order."""
    out = []
    for name in LEXICON_NAMES:
        ref = resources.files("checkworthy").joinpath("data", f"lexicon_{name}.txt")
        try:
            with resources.as_file(ref) as path:
                out.append(load_lexicon(path, name))
        except FileNotFoundError as exc:
            raise MissingResource(f"bundled lexicon missing: {name}") from exc
    return tuple(out)


# --------------------------------------------------------------------------
# TF.IDF
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    df: Mapping[str, int]
    bucket_count: int


def build_corpus_stats(documents: Sequence[Sequence[Token]], bucket_count: int = DEFAULT_TFIDF_BUCKETS) -> CorpusStats:
    """Document frequencies over lowercased, segment-level terms."""
    if not documents:
        raise EmptyCorpus("corpus statistics need at least one document")
    df: Counter[str] = Counter()
    for doc in documents:
        df.update(set(terms_of(doc)))
    return CorpusStats(doc_count=len(documents), df=dict(df), bucket_count=bucket_count)


def tfidf_segment(tokens: Sequence[Token], stats: CorpusStats) -> np.ndarray:
    """Hash-bucketed TF.IDF: tf = count/len(terms), idf = ln(N/df) with
    df fallback 1 for unseen terms; collisions accumulate additively."""
    vec = np.zeros(stats.bucket_count)
    terms = terms_of(tokens)
    if not terms:
        return vec
    n = len(terms)
    counts = Counter(terms)
    for term, count in counts.items():
        idf = math.log(stats.doc_count / stats.df.get(term, 1))
        if idf == 0.0:
            continue
        vec[stable_hash64(term) % stats.bucket_count] += (count / n) * idf
    return vec


# --------------------------------------------------------------------------
# Layout and scaler
# --------------------------------------------------------------------------

N_POS = len(UPOS_ORDER)  # 17
N_LEXICON = 2 * len(LEXICON_NAMES)  # count + ratio per lexicon
N_STRUCTURAL = 3  # relative position, token count, log1p token count
N_NE = 1


@dataclass(frozen=True)
class FeatureLayout:
    """Ordered named segments with offsets; persisted with the model and
    checked against every resource at inference time."""

    tfidf_buckets: int = DEFAULT_TFIDF_BUCKETS
    embedding_dim: int = 300
    topic_count: int = 30

    @property
    def segments(self) -> tuple[tuple[str, int], ...]:
        return (
            ("tfidf", self.tfidf_buckets),
            ("embedding", self.embedding_dim),
            ("pos", N_POS),
            ("lexicon", N_LEXICON),
            ("structural", N_STRUCTURAL),
            ("ne", N_NE),
            ("topics", self.topic_count),
        )

    @property
    def total_dim(self) -> int:
        return sum(width for _, width in self.segments)

    def slice_of(self, name: str) -> slice:
        offset = 0
        for seg_name, width in self.segments:
            if seg_name == name:
                return slice(offset, offset + width)
            offset += width
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "tfidf_buckets": self.tfidf_buckets,
            "embedding_dim": self.embedding_dim,
            "topic_count": self.topic_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureLayout":
        return cls(
            tfidf_buckets=int(data["tfidf_buckets"]),
            embedding_dim=int(data["embedding_dim"]),
            topic_count=int(data["topic_count"]),
        )


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    layout: FeatureLayout

    def segment(self, name: str) -> np.ndarray:
        return self.values[self.layout.slice_of(name)]


@dataclass(frozen=True)
class Scaler:
    """Per-dimension z-score with population (ddof=0) statistics.

    Dimensions with std below 1e-12 pass through completely unchanged.
    """

    mean: np.ndarray
    std: np.ndarray

    STD_FLOOR = 1e-12

    def transform(self, values: np.ndarray) -> np.ndarray:
        guarded = self.std >= self.STD_FLOOR
        out = np.array(values, dtype=np.float64, copy=True)
        out[..., guarded] = (values[..., guarded] - self.mean[guarded]) / self.std[guarded]
        return out


def fit_scaler(train_vectors: Sequence[np.ndarray] | np.ndarray) -> Scaler:
    matrix = np.asarray(train_vectors, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise TooFewSamples("scaler fitting needs at least 2 vectors")
    return Scaler(mean=matrix.mean(axis=0), std=matrix.std(axis=0))


def apply_scaler(scaler: Scaler, vector: FeatureVector) -> FeatureVector:
    return FeatureVector(values=scaler.transform(vector.values), layout=vector.layout)


# --------------------------------------------------------------------------
# Featurization
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SentenceContext:
    tokens: Sequence[Token]
    upos: Sequence[UposTag]
    index: int
    n_sentences: int
    language: Language


@dataclass
class FeatureResources:
    """Immutable bundle of everything featurization needs; validated against
    the layout once at construction."""

    layout: FeatureLayout
    stats: CorpusStats
    lexicons: Sequence[Lexicon]
    embeddings: Mapping[Language, "object"]  # Language -> EmbeddingTable
    lda: "object"  # LdaModel
    lda_infer_iterations: int = 50
    lda_infer_seed: int = 13

    def __post_init__(self):
        if self.stats.bucket_count != self.layout.tfidf_buckets:
            raise LayoutMismatch(
                f"corpus stats have {self.stats.bucket_count} buckets, layout expects {self.layout.tfidf_buckets}"
            )
        names = tuple(lx.name for lx in self.lexicons)
        if names != LEXICON_NAMES:
            raise LayoutMismatch(f"lexicons must be {LEXICON_NAMES}, got {names}")
        for lang, table in self.embeddings.items():
            if table.dim != self.layout.embedding_dim:
                raise LayoutMismatch(
                    f"{lang.value} embedding dim {table.dim} != layout dim {self.layout.embedding_dim}"
                )
        if self.lda.k != self.layout.topic_count:
            raise LayoutMismatch(f"LDA has {self.lda.k} topics, layout expects {self.layout.topic_count}")

    def table_for(self, lang: Language):
        """The language's table; deployments without one for `lang` fall back
        to the English table (tokens simply look up as OOV there)."""
        table = self.embeddings.get(lang)
        if table is None:
            table = self.embeddings.get(Language.ENGLISH)
        if table is None:
            raise MissingResource(f"no embedding table loaded for {lang.value}")
        return table


def _lexicon_segment(tokens: Sequence[Token], lexicons: Sequence[Lexicon]) -> np.ndarray:
    out = np.zeros(2 * len(lexicons))
    n = len(tokens)
    for i, lexicon in enumerate(lexicons):
        weighted = 0.0
        matched = 0
        for tok in tokens:
            w = lexicon.weight(tok.surface.lower())
            if w is None and len(tok.segments) > 1:
                w = lexicon.weight(stem_of(tok).lower())
            if w is not None:
                weighted += w
                matched += 1
        out[2 * i] = weighted
        out[2 * i + 1] = matched / n if n else 0.0
    return out


def _ne_count(ctx: SentenceContext) -> int:
    count = 0
    for pos, (tok, tag) in enumerate(zip(ctx.tokens, ctx.upos)):
        capitalized = (
            ctx.language is Language.ENGLISH
            and pos > 0
            and tok.surface[:1].isalpha()
            and tok.surface[:1].isupper()
        )
        if capitalized or tag is UposTag.PROPN:
            count += 1
    return count


def featurize_sentence(ctx: SentenceContext, res: FeatureResources) -> FeatureVector:
    """Fill every layout segment for one sentence. Deterministic: identical
    inputs and resources yield bitwise-identical vectors."""
    from . import embeddings as emb
    from . import topics as top

    layout = res.layout
    values = np.zeros(layout.total_dim)

    values[layout.slice_of("tfidf")] = tfidf_segment(ctx.tokens, res.stats)
    values[layout.slice_of("embedding")] = emb.sentence_embedding(ctx.tokens, res.table_for(ctx.language))

    pos_hist = np.zeros(N_POS)
    for tag in ctx.upos:
        pos_hist[UPOS_ORDER.index(tag)] += 1
    if ctx.upos:
        pos_hist /= len(ctx.upos)
    values[layout.slice_of("pos")] = pos_hist

    values[layout.slice_of("lexicon")] = _lexicon_segment(ctx.tokens, res.lexicons)

    rel_pos = ctx.index / (ctx.n_sentences - 1) if ctx.n_sentences > 1 else 0.0
    n_tokens = len(ctx.tokens)
    values[layout.slice_of("structural")] = (rel_pos, float(n_tokens), math.log1p(n_tokens))

    values[layout.slice_of("ne")] = float(_ne_count(ctx))

    values[layout.slice_of("topics")] = top.lda_infer(
        terms_of(ctx.tokens), res.lda, iterations=res.lda_infer_iterations, seed=res.lda_infer_seed
    )

    if not np.all(np.isfinite(values)):
        raise LayoutMismatch("non-finite feature values produced")  # defensive; unreachable by construction
    return FeatureVector(values=values, layout=layout)
