"""Three-layer feed-forward classifier trained with Adagrad.

Architecture: input -> 128 ReLU -> 64 tanh -> 3-way softmax, with
inverted dropout (keep-prob 1 - rate) applied to the input and to the
first hidden layer's output during training. Gradients are derived
analytically; nothing here depends on an autodiff framework. Training
is single-threaded and fully deterministic for a given seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

HIDDEN1 = 128
HIDDEN2 = 64
N_CLASSES = 3

CHECKPOINT_VERSION = 1

_LOSS_CLAMP = 1e-12


@dataclass
class TrainConfig:
    epochs: int = 35
    batch_size: int = 75
    dropout_rate: float = 0.2
    learning_rate: float = 0.01
    adagrad_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.adagrad_epsilon <= 0.0:
            raise ValueError("adagrad_epsilon must be positive")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "dropout_rate": self.dropout_rate,
            "learning_rate": self.learning_rate,
            "adagrad_epsilon": self.adagrad_epsilon,
            "seed": self.seed,
        }


@dataclass
class MlpParams:
    w1: np.ndarray  # (128, d)
    b1: np.ndarray  # (128,)
    w2: np.ndarray  # (64, 128)
    b2: np.ndarray  # (64,)
    w3: np.ndarray  # (3, 64)
    b3: np.ndarray  # (3,)

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @classmethod
    def glorot_init(cls, input_dim: int, rng: np.random.Generator) -> "MlpParams":
        if input_dim < 1:
            raise ValueError(f"input dimension must be >= 1, got {input_dim}")

        def uniform(fan_out: int, fan_in: int) -> np.ndarray:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-limit, limit, size=(fan_out, fan_in))

        return cls(
            w1=uniform(HIDDEN1, input_dim),
            b1=np.zeros(HIDDEN1),
            w2=uniform(HIDDEN2, HIDDEN1),
            b2=np.zeros(HIDDEN2),
            w3=uniform(N_CLASSES, HIDDEN2),
            b3=np.zeros(N_CLASSES),
        )

    def arrays(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2,
                "w3": self.w3, "b3": self.b3}

    def copy(self) -> "MlpParams":
        return MlpParams(**{k: v.copy() for k, v in self.arrays().items()})


@dataclass
class ForwardCache:
    """Activations saved by forward for the matching backward call."""

    x_in: np.ndarray       # input after (scaled) dropout, (n, d)
    z1: np.ndarray         # pre-ReLU, (n, 128)
    h1_in: np.ndarray      # ReLU output after (scaled) dropout, (n, 128)
    h2: np.ndarray         # tanh output, (n, 64)
    probs: np.ndarray      # softmax output, (n, 3)
    input_mask: Optional[np.ndarray]   # scaled masks; None in eval mode
    hidden_mask: Optional[np.ndarray]
    mode: str


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction for stability."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def forward_batch(
    params: MlpParams,
    x: np.ndarray,
    mode: str = "eval",
    rng: Optional[np.random.Generator] = None,
    dropout_rate: float = 0.2,
) -> tuple[np.ndarray, ForwardCache]:
    """Run the network over a batch; returns (probs (n, 3), cache)."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise ValueError(
            f"expected input of shape (n, {params.input_dim}), got {x.shape}"
        )

    input_mask = hidden_mask = None
    if mode == "train" and dropout_rate > 0.0:
        if rng is None:
            raise ValueError("train-mode forward with dropout requires an rng")
        keep = 1.0 - dropout_rate
        # Inverted dropout: surviving units scaled by 1/keep so eval
        # needs no rescaling.
        input_mask = (rng.random(x.shape) < keep).astype(np.float64) / keep
        x_in = x * input_mask
    else:
        x_in = x

    z1 = x_in @ params.w1.T + params.b1
    h1 = np.maximum(z1, 0.0)

    if input_mask is not None:
        keep = 1.0 - dropout_rate
        hidden_mask = (rng.random(h1.shape) < keep).astype(np.float64) / keep
        h1_in = h1 * hidden_mask
    else:
        h1_in = h1

    h2 = np.tanh(h1_in @ params.w2.T + params.b2)
    probs = softmax(h2 @ params.w3.T + params.b3)
    cache = ForwardCache(x_in, z1, h1_in, h2, probs, input_mask, hidden_mask, mode)
    return probs, cache


def forward(
    params: MlpParams,
    x: np.ndarray,
    mode: str = "eval",
    rng: Optional[np.random.Generator] = None,
    dropout_rate: float = 0.2,
) -> tuple[np.ndarray, ForwardCache]:
    """Single-example forward; returns (posterior (3,), cache)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D input vector, got shape {x.shape}")
    probs, cache = forward_batch(params, x[None, :], mode, rng, dropout_rate)
    return probs[0], cache


def loss(posterior: np.ndarray, label: int) -> float:
    """Categorical cross-entropy of a single posterior, clamped at 1e-12."""
    posterior = np.asarray(posterior, dtype=np.float64)
    if label not in (0, 1, 2):
        raise ValueError(f"label must be in {{0, 1, 2}}, got {label}")
    return float(-np.log(max(posterior[label], _LOSS_CLAMP)))


def batch_loss(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean cross-entropy over a batch."""
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.log(np.clip(picked, _LOSS_CLAMP, None)).mean())


@dataclass
class MlpGrads:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    def arrays(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2,
                "w3": self.w3, "b3": self.b3}


def backward(params: MlpParams, cache: ForwardCache, labels: np.ndarray | int) -> MlpGrads:
    """Analytic gradients of the mean cross-entropy over the cached batch.

    Dropout masks recorded in the cache are treated as constants.
    """
    labels = np.atleast_1d(np.asarray(labels, dtype=np.intp))
    n = cache.probs.shape[0]
    if labels.shape[0] != n:
        raise ValueError(f"expected {n} labels, got {labels.shape[0]}")

    d_z3 = cache.probs.copy()
    d_z3[np.arange(n), labels] -= 1.0
    d_z3 /= n

    g_w3 = d_z3.T @ cache.h2
    g_b3 = d_z3.sum(axis=0)

    d_h2 = d_z3 @ params.w3
    d_z2 = d_h2 * (1.0 - cache.h2**2)
    g_w2 = d_z2.T @ cache.h1_in
    g_b2 = d_z2.sum(axis=0)

    d_h1_in = d_z2 @ params.w2
    d_h1 = d_h1_in if cache.hidden_mask is None else d_h1_in * cache.hidden_mask
    d_z1 = d_h1 * (cache.z1 > 0.0)
    g_w1 = d_z1.T @ cache.x_in
    g_b1 = d_z1.sum(axis=0)

    return MlpGrads(g_w1, g_b1, g_w2, g_b2, g_w3, g_b3)


@dataclass
class AdagradState:
    """Per-coordinate squared-gradient accumulators."""

    acc: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: MlpParams) -> "AdagradState":
        return cls(acc={k: np.zeros_like(v) for k, v in params.arrays().items()})


def adagrad_step(
    params: MlpParams,
    grads: MlpGrads,
    state: AdagradState,
    config: TrainConfig,
) -> tuple[MlpParams, AdagradState]:
    """One Adagrad update, in place: acc += g^2; p -= lr * g / (sqrt(acc) + eps)."""
    grad_arrays = grads.arrays()
    for name, param in params.arrays().items():
        grad = grad_arrays[name]
        acc = state.acc[name]
        acc += grad**2
        param -= config.learning_rate * grad / (np.sqrt(acc) + config.adagrad_epsilon)
    return params, state


def train(x: np.ndarray, y: np.ndarray, config: TrainConfig) -> MlpParams:
    """Train on labeled vectors; deterministic for a given config seed.

    Examples are reshuffled each epoch; the final short mini-batch is
    trained on rather than dropped.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("training requires a non-empty (n, d) matrix")
    if y.shape != (x.shape[0],):
        raise ValueError(f"expected {x.shape[0]} labels, got shape {y.shape}")
    if not np.all((y >= 0) & (y < N_CLASSES)):
        raise ValueError("labels must be in {0, 1, 2}")
    if not np.all(np.isfinite(x)):
        raise ValueError("training matrix contains non-finite values")

    rng = np.random.default_rng(config.seed)
    params = MlpParams.glorot_init(x.shape[1], rng)
    state = AdagradState.zeros_like(params)

    n = x.shape[0]
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for lo in range(0, n, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            _, cache = forward_batch(
                params, x[batch], mode="train", rng=rng, dropout_rate=config.dropout_rate
            )
            grads = backward(params, cache, y[batch])
            adagrad_step(params, grads, state, config)
    return params


def predict_proba(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Eval-mode posteriors for a batch of vectors, shape (n, 3)."""
    probs, _ = forward_batch(params, np.atleast_2d(x), mode="eval")
    return probs


def save_checkpoint(params: MlpParams, config: TrainConfig, path: str | Path):
    """Write a versioned JSON checkpoint with exact 64-bit weights."""
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "input_dim": params.input_dim,
        "hidden": [HIDDEN1, HIDDEN2],
        "classes": N_CLASSES,
        "config": config.to_dict(),
        "weights": {k: v.tolist() for k, v in params.arrays().items()},
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_checkpoint(path: str | Path) -> tuple[MlpParams, TrainConfig]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version!r}")
    weights = {k: np.asarray(v, dtype=np.float64) for k, v in payload["weights"].items()}
    params = MlpParams(**weights)
    expected = {
        "w1": (HIDDEN1, payload["input_dim"]),
        "b1": (HIDDEN1,),
        "w2": (HIDDEN2, HIDDEN1),
        "b2": (HIDDEN2,),
        "w3": (N_CLASSES, HIDDEN2),
        "b3": (N_CLASSES,),
    }
    for name, shape in expected.items():
        if weights[name].shape != shape:
            raise ValueError(
                f"checkpoint weight {name} has shape {weights[name].shape}, expected {shape}"
            )
    return params, TrainConfig(**payload["config"])
