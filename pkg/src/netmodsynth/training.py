"""Mini-batch gradient-descent training of the spectral autoencoder.

MSE identity-regression with Adam-style adaptive-moment updates. Only the
bias vectors the model declares trainable receive updates; all other biases
stay identically zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import TrainingError
from .model import AutoencoderModel, LayerSpec

MIN_CORPUS_FRAMES = 1000

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0
    validation_fraction: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass
class TrainResult:
    model: AutoencoderModel
    history: list[tuple[int, float, float]] = field(default_factory=list)
    # rows of (epoch, train_mse, val_mse), epoch starting at 1

    def save_history_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_mse", "val_mse"])
            writer.writerows(self.history)


def forward_full(model: AutoencoderModel, x: np.ndarray):
    """Forward pass keeping per-layer activations and pre-activations."""
    acts, pres = [x], []
    h = x
    for w, b in zip(model.weights, model.biases):
        z = h @ w + b
        pres.append(z)
        h = np.maximum(z, 0.0)
        acts.append(h)
    return acts, pres


def loss_and_gradients(model: AutoencoderModel, batch: np.ndarray):
    """Mean-squared identity loss and its gradients for one batch.

    Returns (loss, weight_grads, bias_grads); bias gradients are zeroed for
    layers without a trainable bias.
    """
    batch = np.asarray(batch, dtype=model.dtype)
    acts, pres = forward_full(model, batch)
    out = acts[-1]
    diff = out - batch
    loss = float(np.mean(diff**2))

    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.weights)
    d = (2.0 / diff.size) * diff
    for k in range(len(model.weights) - 1, -1, -1):
        d = d * (pres[k] > 0)
        grad_w[k] = acts[k].T @ d
        if k in model.bias_layers:
            grad_b[k] = d.sum(axis=0)
        else:
            grad_b[k] = np.zeros_like(model.biases[k])
        if k > 0:
            d = d @ model.weights[k].T
    return loss, grad_w, grad_b


def evaluate_mse(model: AutoencoderModel, frames: np.ndarray, batch_size: int = 256):
    frames = np.asarray(frames, dtype=model.dtype)
    total = 0.0
    for i in range(0, len(frames), batch_size):
        chunk = frames[i : i + batch_size]
        acts, _ = forward_full(model, chunk)
        total += float(np.sum((acts[-1] - chunk) ** 2))
    return total / frames.size


def train(
    corpus: np.ndarray,
    cfg: TrainConfig | None = None,
    layer_spec: LayerSpec | None = None,
) -> TrainResult:
    """Train an autoencoder on magnitude frames; deterministic per seed."""
    cfg = cfg or TrainConfig()
    corpus = np.asarray(corpus, dtype=np.float32)
    if corpus.ndim != 2 or len(corpus) < MIN_CORPUS_FRAMES:
        raise TrainingError(
            f"corpus must have at least {MIN_CORPUS_FRAMES} frames, "
            f"got {0 if corpus.ndim != 2 else len(corpus)}"
        )

    rng = np.random.default_rng(cfg.seed)
    model = AutoencoderModel.initialize(layer_spec, seed=cfg.seed, dtype=np.float32)

    perm = rng.permutation(len(corpus))
    n_val = max(1, int(len(corpus) * cfg.validation_fraction))
    val, tr = corpus[perm[:n_val]], corpus[perm[n_val:]]

    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    step = 0

    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(tr))
        epoch_loss, n_batches = 0.0, 0
        for i in range(0, len(tr), cfg.batch_size):
            batch = tr[order[i : i + cfg.batch_size]]
            loss, grad_w, grad_b = loss_and_gradients(model, batch)
            epoch_loss += loss
            n_batches += 1
            step += 1
            corr1 = 1.0 - _ADAM_BETA1**step
            corr2 = 1.0 - _ADAM_BETA2**step
            for k in range(len(model.weights)):
                m_w[k] = _ADAM_BETA1 * m_w[k] + (1 - _ADAM_BETA1) * grad_w[k]
                v_w[k] = _ADAM_BETA2 * v_w[k] + (1 - _ADAM_BETA2) * grad_w[k] ** 2
                model.weights[k] -= cfg.learning_rate * (m_w[k] / corr1) / (
                    np.sqrt(v_w[k] / corr2) + _ADAM_EPS
                )
                if k in model.bias_layers:
                    m_b[k] = _ADAM_BETA1 * m_b[k] + (1 - _ADAM_BETA1) * grad_b[k]
                    v_b[k] = _ADAM_BETA2 * v_b[k] + (1 - _ADAM_BETA2) * grad_b[k] ** 2
                    model.biases[k] -= cfg.learning_rate * (m_b[k] / corr1) / (
                        np.sqrt(v_b[k] / corr2) + _ADAM_EPS
                    )
        val_mse = evaluate_mse(model, val)
        history.append((epoch, epoch_loss / n_batches, val_mse))
    return TrainResult(model=model, history=history)
