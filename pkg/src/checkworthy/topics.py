"""LDA topic model via collapsed Gibbs sampling.

One sentence is one document. Sampling is seeded and fully deterministic:
per-sweep uniforms come from a PCG64 stream and the sweep itself is a
sequential scan compiled with numba. Inference folds new documents in
against frozen topic-word counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numba import njit

from .errors import EmptyCorpus, InvalidHyperparameter

DEFAULT_TOPICS = 30
DEFAULT_BETA = 0.01
DEFAULT_FIT_ITERATIONS = 500
DEFAULT_INFER_ITERATIONS = 50


@dataclass
class LdaModel:
    k: int
    alpha: float
    beta: float
    vocab: Mapping[str, int]
    topic_word: np.ndarray  # (k, V) int64 counts
    topic_totals: np.ndarray  # (k,) int64, row sums of topic_word

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)


@njit(cache=True)
def _fit_sweep(doc_ids, word_ids, z, ndk, nkw, nk, u, alpha, beta, probs):
    vbeta = nkw.shape[1] * beta
    k = nkw.shape[0]
    for i in range(doc_ids.shape[0]):
        d = doc_ids[i]
        w = word_ids[i]
        t = z[i]
        ndk[d, t] -= 1
        nkw[t, w] -= 1
        nk[t] -= 1
        total = 0.0
        for kk in range(k):
            total += (ndk[d, kk] + alpha) * (nkw[kk, w] + beta) / (nk[kk] + vbeta)
            probs[kk] = total
        r = u[i] * total
        t_new = 0
        while t_new < k - 1 and probs[t_new] < r:
            t_new += 1
        z[i] = t_new
        ndk[d, t_new] += 1
        nkw[t_new, w] += 1
        nk[t_new] += 1


@njit(cache=True)
def _infer_sweep(word_ids, z, nd, nkw, nk, u, alpha, beta, probs):
    vbeta = nkw.shape[1] * beta
    k = nkw.shape[0]
    for i in range(word_ids.shape[0]):
        w = word_ids[i]
        t = z[i]
        nd[t] -= 1
        total = 0.0
        for kk in range(k):
            total += (nd[kk] + alpha) * (nkw[kk, w] + beta) / (nk[kk] + vbeta)
            probs[kk] = total
        r = u[i] * total
        t_new = 0
        while t_new < k - 1 and probs[t_new] < r:
            t_new += 1
        z[i] = t_new
        nd[t_new] += 1


def _validate_hyperparameters(k: int, alpha: float, beta: float) -> None:
    if k < 1:
        raise InvalidHyperparameter(f"topic count must be >= 1, got {k}")
    if alpha <= 0:
        raise InvalidHyperparameter(f"alpha must be positive, got {alpha}")
    if beta <= 0:
        raise InvalidHyperparameter(f"beta must be positive, got {beta}")


def lda_fit(
    documents: Sequence[Sequence[str]],
    k: int = DEFAULT_TOPICS,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_FIT_ITERATIONS,
    seed: int = 0,
) -> LdaModel:
    """Collapsed Gibbs sampling over term-list documents.

    Token i's topic is sampled proportionally to
    (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta), all counts excluding
    token i. Deterministic given (documents, hyperparameters, seed).
    """
    if k < 1:
        raise InvalidHyperparameter(f"topic count must be >= 1, got {k}")
    if alpha is None:
        alpha = 50.0 / k
    _validate_hyperparameters(k, alpha, beta)

    vocab: dict[str, int] = {}
    doc_ids_list: list[int] = []
    word_ids_list: list[int] = []
    for d, doc in enumerate(documents):
        for term in doc:
            idx = vocab.get(term)
            if idx is None:
                idx = len(vocab)
                vocab[term] = idx
            doc_ids_list.append(d)
            word_ids_list.append(idx)
    if not word_ids_list:
        raise EmptyCorpus("no tokens to fit a topic model on")

    n_docs = len(documents)
    v = len(vocab)
    doc_ids = np.asarray(doc_ids_list, dtype=np.int64)
    word_ids = np.asarray(word_ids_list, dtype=np.int64)

    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.integers(0, k, size=doc_ids.shape[0], dtype=np.int64)

    ndk = np.zeros((n_docs, k), dtype=np.int64)
    nkw = np.zeros((k, v), dtype=np.int64)
    nk = np.zeros(k, dtype=np.int64)
    np.add.at(ndk, (doc_ids, z), 1)
    np.add.at(nkw, (z, word_ids), 1)
    np.add.at(nk, z, 1)

    probs = np.empty(k, dtype=np.float64)
    for _ in range(iterations):
        u = rng.random(doc_ids.shape[0])
        _fit_sweep(doc_ids, word_ids, z, ndk, nkw, nk, u, float(alpha), float(beta), probs)

    assert np.array_equal(nk, nkw.sum(axis=1)), "topic totals out of sync with count matrix"
    return LdaModel(k=k, alpha=float(alpha), beta=float(beta), vocab=vocab, topic_word=nkw, topic_totals=nk)


def lda_infer(
    terms: Sequence[str],
    model: LdaModel,
    iterations: int = DEFAULT_INFER_ITERATIONS,
    seed: int = 13,
) -> np.ndarray:
    """Fold-in Gibbs against frozen counts; returns the smoothed document
    topic distribution (n_dk + alpha) / (sum_k n_dk + K*alpha).

    OOV terms are skipped; with zero in-vocabulary terms the distribution
    is uniform.
    """
    ids = [model.vocab[t] for t in terms if t in model.vocab]
    k = model.k
    if not ids:
        return np.full(k, 1.0 / k)
    word_ids = np.asarray(ids, dtype=np.int64)
    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.integers(0, k, size=word_ids.shape[0], dtype=np.int64)
    nd = np.zeros(k, dtype=np.int64)
    np.add.at(nd, z, 1)
    probs = np.empty(k, dtype=np.float64)
    for _ in range(iterations):
        u = rng.random(word_ids.shape[0])
        _infer_sweep(word_ids, z, nd, model.topic_word, model.topic_totals, u, model.alpha, model.beta, probs)
    dist = (nd + model.alpha) / (nd.sum() + k * model.alpha)
    return dist
