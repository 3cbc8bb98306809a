"""Ranking and IR evaluation metrics.

Scores rank descending with ties broken by ascending sentence index.
Metrics (AP, MAP, R-Precision, P@k) follow the standard definitions over
binary relevance labels; per-debate values are averaged, never pooled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyInput, NonFiniteScore

DEFAULT_KS: tuple[int, ...] = (5, 10, 20, 50)


@dataclass(frozen=True)
class RankedList:
    """(sentence_index, score) pairs, best first."""

    items: tuple[tuple[int, float], ...]

    @property
    def order(self) -> list[int]:
        return [idx for idx, _ in self.items]


@dataclass(frozen=True)
class Metrics:
    map: float
    r_precision: float
    p_at: Mapping[int, float]

    def to_dict(self) -> dict:
        out = {"map": self.map, "r_precision": self.r_precision}
        for k in sorted(self.p_at):
            out[f"p_at_{k}"] = self.p_at[k]
        return out


def rank(scores: Sequence[float]) -> RankedList:
    """Stable ordering: score descending, ties by ascending input index."""
    if len(scores) == 0:
        raise EmptyInput("cannot rank an empty score list")
    for s in scores:
        if not math.isfinite(s):
            raise NonFiniteScore(f"non-finite score: {s!r}")
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return RankedList(items=tuple((i, float(scores[i])) for i in order))


def average_precision(ranked_labels: Sequence[int]) -> float:
    """AP = mean of precision@i over relevant positions i; 0.0 when the
    list has no relevant items."""
    positives = 0
    total = 0.0
    for i, label in enumerate(ranked_labels, start=1):
        if label:
            positives += 1
            total += positives / i
    if positives == 0:
        return 0.0
    return total / positives


def precision_at_k(ranked_labels: Sequence[int], k: int) -> float:
    """Positives among the top k, divided by k; lists shorter than k are
    implicitly padded with non-relevant items."""
    return sum(1 for label in ranked_labels[:k] if label) / k


def r_precision(ranked_labels: Sequence[int]) -> float:
    """Precision at rank R where R is the number of positives; 0.0 when
    there are none."""
    r = sum(1 for label in ranked_labels if label)
    if r == 0:
        return 0.0
    return precision_at_k(ranked_labels, r)


def evaluate(ranked_labels_per_debate: Sequence[Sequence[int]], ks: Sequence[int] = DEFAULT_KS) -> Metrics:
    """Per-debate AP / R-Precision / P@k averaged across debates."""
    debates = [list(labels) for labels in ranked_labels_per_debate]
    if not debates or any(len(d) == 0 for d in debates):
        raise EmptyInput("every debate needs at least one ranked label")
    n = len(debates)
    mean_ap = sum(average_precision(d) for d in debates) / n
    mean_rp = sum(r_precision(d) for d in debates) / n
    p_at = {k: sum(precision_at_k(d, k) for d in debates) / n for k in ks}
    return Metrics(map=mean_ap, r_precision=mean_rp, p_at=p_at)


def random_baseline(
    labels_per_debate: Sequence[Sequence[int]],
    trials: int = 1000,
    seed: int = 0,
    ks: Sequence[int] = DEFAULT_KS,
) -> Metrics:
    """Expected metrics of a uniformly random ranking, estimated by seeded
    shuffles of each debate's labels."""
    if trials < 1:
        raise EmptyInput("trials must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    acc_map = 0.0
    acc_rp = 0.0
    acc_p = {k: 0.0 for k in ks}
    arrays = [np.asarray(labels) for labels in labels_per_debate]
    for _ in range(trials):
        shuffled = [rng.permutation(arr).tolist() for arr in arrays]
        metrics = evaluate(shuffled, ks=ks)
        acc_map += metrics.map
        acc_rp += metrics.r_precision
        for k in ks:
            acc_p[k] += metrics.p_at[k]
    return Metrics(
        map=acc_map / trials,
        r_precision=acc_rp / trials,
        p_at={k: acc_p[k] / trials for k in ks},
    )
