"""Feedforward check-worthiness scorer.

One shared network with two hidden ReLU layers (200 and 50 units by
default) and one sigmoid output per source; the ranking key for a source
is its positive-class probability. Trained with plain per-example SGD on
masked binary cross-entropy, where the mask marks sources whose label is
known for a sentence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyDataset, EmptyMask, LayoutMismatch, UnknownSource
from .features import FeatureLayout, Scaler

SOURCES: tuple[str, ...] = (
    "PolitiFact",
    "FactCheck",
    "ABC",
    "CNN",
    "NPR",
    "NYT",
    "ChicagoTribune",
    "Guardian",
    "WashingtonPost",
    "Any",
)

DEFAULT_HIDDEN = (200, 50)

# Pre-activations are clamped so sigmoid outputs stay inside the open
# interval (0, 1) in float64 even when a unit saturates.
_Z_CLAMP = 36.0


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -_Z_CLAMP, _Z_CLAMP)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


@dataclass
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 0.01
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate}")


@dataclass
class MlpModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    layout: FeatureLayout
    scaler: Scaler | None = None
    sources: tuple[str, ...] = SOURCES

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.w3.shape[0]

    def params(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2, "w3": self.w3, "b3": self.b3}


def init_model(
    layout: FeatureLayout,
    seed: int = 0,
    hidden: tuple[int, int] = DEFAULT_HIDDEN,
    n_outputs: int = len(SOURCES),
    sources: tuple[str, ...] = SOURCES,
) -> MlpModel:
    """Glorot-uniform weights, zero biases, drawn deterministically from one
    seeded stream in layer order."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dims = [layout.total_dim, hidden[0], hidden[1], n_outputs]
    weights = []
    for fan_in, fan_out in zip(dims, dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
    return MlpModel(
        w1=weights[0],
        b1=np.zeros(dims[1]),
        w2=weights[1],
        b2=np.zeros(dims[2]),
        w3=weights[2],
        b3=np.zeros(dims[3]),
        layout=layout,
        sources=sources,
    )


def _forward_cached(model: MlpModel, x: np.ndarray):
    z1 = model.w1 @ x + model.b1
    h1 = relu(z1)
    z2 = model.w2 @ h1 + model.b2
    h2 = relu(z2)
    p = sigmoid(model.w3 @ h2 + model.b3)
    return z1, h1, z2, h2, p


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Per-source probabilities for an already-scaled feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_dim,):
        raise LayoutMismatch(f"input shape {x.shape} does not match model input dim {model.input_dim}")
    return _forward_cached(model, x)[4]


def bce_loss(p: np.ndarray, y: np.ndarray, mask: np.ndarray) -> float:
    """Masked-mean binary cross-entropy."""
    m = mask.astype(bool)
    if not m.any():
        raise EmptyMask("no labeled sources for this example")
    pc = np.clip(p[m], 1e-15, 1.0 - 1e-15)
    ym = y[m]
    return float(-np.mean(ym * np.log(pc) + (1.0 - ym) * np.log(1.0 - pc)))


def _backprop(model: MlpModel, x: np.ndarray, y: np.ndarray, mask: np.ndarray) -> tuple[dict[str, np.ndarray], float]:
    m = mask.astype(bool)
    n_masked = int(m.sum())
    if n_masked == 0:
        raise EmptyMask("no labeled sources for this example")
    x = np.asarray(x, dtype=np.float64)
    z1, h1, z2, h2, p = _forward_cached(model, x)
    loss = bce_loss(p, y, mask)

    dz3 = np.where(m, (p - y) / n_masked, 0.0)
    dw3 = np.outer(dz3, h2)
    db3 = dz3
    dh2 = model.w3.T @ dz3
    dz2 = dh2 * (z2 > 0)
    dw2 = np.outer(dz2, h1)
    db2 = dz2
    dh1 = model.w2.T @ dz2
    dz1 = dh1 * (z1 > 0)
    dw1 = np.outer(dz1, x)
    db1 = dz1
    return {"w1": dw1, "b1": db1, "w2": dw2, "b2": db2, "w3": dw3, "b3": db3}, loss


def gradients(model: MlpModel, x: np.ndarray, y: np.ndarray, mask: np.ndarray) -> dict[str, np.ndarray]:
    """Backpropagated gradients of the masked-mean BCE loss."""
    return _backprop(model, x, y, mask)[0]


@dataclass
class TrainResult:
    model: MlpModel
    epoch_losses: list[float] = field(default_factory=list)


def train_sgd(
    dataset: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray]],
    config: TrainConfig,
    layout: FeatureLayout,
    scaler: Scaler | None = None,
    hidden: tuple[int, int] = DEFAULT_HIDDEN,
    sources: tuple[str, ...] = SOURCES,
) -> TrainResult:
    """Per-example SGD over (scaled_features, labels, mask) triples.

    Each epoch reshuffles with the seeded stream, then applies one update
    per example. The per-epoch mean loss (computed at the pre-update
    parameters of each step) is recorded.
    """
    if not dataset:
        raise EmptyDataset("training requires at least one example")
    model = init_model(layout, seed=config.seed, hidden=hidden, n_outputs=len(sources), sources=sources)
    model.scaler = scaler
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = len(dataset)
    losses = []
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        epoch_loss = 0.0
        params = model.params()
        for i in order:
            x, y, mask = dataset[i]
            grads, loss = _backprop(model, x, y, mask)
            epoch_loss += loss
            if config.learning_rate:
                for name, grad in grads.items():
                    params[name] -= config.learning_rate * grad
        losses.append(epoch_loss / n)
    return TrainResult(model=model, epoch_losses=losses)


def score(model: MlpModel, x: np.ndarray, source: str) -> float:
    """Ranking key: the probability at the source's output, computed from a
    raw feature vector (the model's scaler is applied internally)."""
    try:
        idx = model.sources.index(source)
    except ValueError:
        raise UnknownSource(f"unknown source: {source!r}") from None
    scaled = model.scaler.transform(np.asarray(x, dtype=np.float64)) if model.scaler else np.asarray(x)
    return float(forward(model, scaled)[idx])
