"""Corpus ingestion, debate-level splitting, synthetic corpus generation.

Corpora are JSON-lines files, one sentence record per line:

    {"debate_id": "d1", "language": "English", "index": 0,
     "text": "...", "labels": {"PolitiFact": 1, "CNN": 0, ...}}

Labels hold only the nine real sources; the union label ("Any") is always
derived as the logical OR of whatever labels are present, never read from
disk. Sources missing from a record are treated as unlabeled and masked
out during training.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DuplicateIndex, EmptyCorpus, ParseError, UnknownDebateId, UnknownSource
from .model import SOURCES
from .text_pipeline import Language

ANNOTATION_SOURCES: tuple[str, ...] = SOURCES[:-1]  # the nine real sources


@dataclass(frozen=True)
class AnnotatedSentence:
    text: str
    labels: dict[str, int] = field(default_factory=dict)

    def any_label(self) -> tuple[int, bool]:
        """(union label, whether any source label is present)."""
        if not self.labels:
            return 0, False
        return (1 if any(self.labels.values()) else 0), True


@dataclass(frozen=True)
class Debate:
    id: str
    language: Language
    sentences: tuple[AnnotatedSentence, ...]


def labels_and_mask(sentence: AnnotatedSentence) -> tuple[np.ndarray, np.ndarray]:
    """Label/mask vectors in SOURCES order; the union output is labeled
    whenever at least one source is."""
    y = np.zeros(len(SOURCES))
    mask = np.zeros(len(SOURCES), dtype=bool)
    for i, source in enumerate(ANNOTATION_SOURCES):
        if source in sentence.labels:
            y[i] = float(sentence.labels[source])
            mask[i] = True
    any_value, known = sentence.any_label()
    y[-1] = float(any_value)
    mask[-1] = known
    return y, mask


def label_for(sentence: AnnotatedSentence, source: str) -> int:
    """Binary relevance of a sentence for one source (unlabeled counts 0)."""
    if source == "Any":
        return sentence.any_label()[0]
    if source not in ANNOTATION_SOURCES:
        raise UnknownSource(f"unknown source: {source!r}")
    return int(sentence.labels.get(source, 0))


def load_corpus(path: str | os.PathLike) -> list[Debate]:
    """Assemble debates from a JSONL file; sentences are ordered by their
    explicit index and debates by first appearance."""
    by_debate: dict[str, dict[int, AnnotatedSentence]] = {}
    languages: dict[str, Language] = {}
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line=ln) from exc
            try:
                debate_id = record["debate_id"]
                language = Language.parse(record["language"])
                index = int(record["index"])
                text = record["text"]
                labels = record.get("labels", {})
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"bad record: {exc}", line=ln) from exc
            for source in labels:
                if source not in ANNOTATION_SOURCES:
                    raise UnknownSource(f"line {ln}: unknown source name {source!r}")
            sentences = by_debate.setdefault(debate_id, {})
            if index in sentences:
                raise DuplicateIndex(f"line {ln}: duplicate index {index} in debate {debate_id!r}")
            known = languages.setdefault(debate_id, language)
            if known is not language:
                raise ParseError(f"debate {debate_id!r} mixes languages", line=ln)
            sentences[index] = AnnotatedSentence(text=text, labels={s: int(v) for s, v in labels.items()})
    if not by_debate:
        raise EmptyCorpus(f"no records in {path}")
    debates = []
    for debate_id, sentences in by_debate.items():
        ordered = tuple(sentences[i] for i in sorted(sentences))
        debates.append(Debate(id=debate_id, language=languages[debate_id], sentences=ordered))
    return debates


def save_corpus(debates: Sequence[Debate], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for debate in debates:
            for index, sentence in enumerate(debate.sentences):
                record = {
                    "debate_id": debate.id,
                    "language": debate.language.value,
                    "index": index,
                    "text": sentence.text,
                    "labels": sentence.labels,
                }
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def split_debates(corpus: Sequence[Debate], test_ids: Sequence[str]) -> tuple[list[Debate], list[Debate]]:
    """Disjoint train/test partition by debate id (never by sentence)."""
    known = {debate.id for debate in corpus}
    wanted = set(test_ids)
    missing = wanted - known
    if missing:
        raise UnknownDebateId(f"test ids not in corpus: {sorted(missing)}")
    train = [d for d in corpus if d.id not in wanted]
    test = [d for d in corpus if d.id in wanted]
    return train, test


# --------------------------------------------------------------------------
# Synthetic corpus generation
# --------------------------------------------------------------------------

_CONSONANTS = "bdklmnprst"
_VOWELS = "aeiou"

# Per-source selection sensitivity: the probability that a source picks a
# check-worthy sentence. Sources disagree partially because these differ.
SOURCE_SENSITIVITY: dict[str, float] = {
    "PolitiFact": 0.90,
    "FactCheck": 0.85,
    "ABC": 0.80,
    "CNN": 0.75,
    "NPR": 0.70,
    "NYT": 0.65,
    "ChicagoTribune": 0.60,
    "Guardian": 0.55,
    "WashingtonPost": 0.50,
}

# Round figures that repeat across sentences, the way real claims reuse
# "50 percent" and "a million"; repetition keeps their document frequency
# informative rather than one-off.
NUMBER_POOL: tuple[str, ...] = (
    "2", "3", "5", "7", "10", "12", "15", "20", "25", "30", "40", "50",
    "60", "75", "80", "90", "100", "200", "500", "1000", "2000", "5000",
    "10000", "1000000",
)

MARKER_INSERT_PROB = 0.9
NUMBER_INSERT_PROB = 0.9
FILLER_VOCAB_SIZE = 2000


def _pseudo_words(n: int, prefix: str = "") -> tuple[str, ...]:
    combos = itertools.product(_CONSONANTS, _VOWELS, _CONSONANTS, _VOWELS)
    return tuple(prefix + "".join(parts) for parts in itertools.islice(combos, n))


def default_marker_vocab() -> tuple[str, ...]:
    return _pseudo_words(40, prefix="zu")


@dataclass(frozen=True)
class SynthConfig:
    n_debates: int = 7
    sentences_per: int = 150
    prevalence: float = 0.15
    marker_vocab: tuple[str, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.prevalence < 1.0:
            raise ValueError(f"prevalence must be in (0, 1), got {self.prevalence}")


def generate_synthetic(config: SynthConfig) -> list[Debate]:
    """Desk-scale stand-in corpus with a plantable check-worthiness signal.

    Check-worthy sentences carry marker terms and a numeric token with
    probability 0.9 each; fillers are Zipf-distributed pseudo-words. Each
    of the nine sources then picks check-worthy sentences independently
    with its own sensitivity, so their selections overlap only partially.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    markers = config.marker_vocab if config.marker_vocab is not None else default_marker_vocab()
    fillers = _pseudo_words(FILLER_VOCAB_SIZE)
    ranks = np.arange(1, len(fillers) + 1, dtype=np.float64)
    zipf = 1.0 / (ranks + 2.7)
    zipf /= zipf.sum()

    debates = []
    for d in range(config.n_debates):
        sentences = []
        for _ in range(config.sentences_per):
            n_words = int(rng.integers(8, 15))
            words = [fillers[i] for i in rng.choice(len(fillers), size=n_words, p=zipf)]
            checkworthy = bool(rng.random() < config.prevalence)
            if checkworthy:
                if rng.random() < MARKER_INSERT_PROB:
                    for marker in rng.choice(markers, size=int(rng.integers(1, 4))):
                        words.insert(int(rng.integers(0, len(words) + 1)), str(marker))
                if rng.random() < NUMBER_INSERT_PROB:
                    number = NUMBER_POOL[int(rng.integers(0, len(NUMBER_POOL)))]
                    words.insert(int(rng.integers(0, len(words) + 1)), number)
            labels = {}
            for source in ANNOTATION_SOURCES:
                picked = checkworthy and bool(rng.random() < SOURCE_SENSITIVITY[source])
                labels[source] = 1 if picked else 0
            text = " ".join(words).capitalize() + "."
            sentences.append(AnnotatedSentence(text=text, labels=labels))
        debates.append(Debate(id=f"synth-{d:02d}", language=Language.ENGLISH, sentences=tuple(sentences)))
    return debates
