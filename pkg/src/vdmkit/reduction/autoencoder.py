"""MLP autoencoders with a built-in deterministic trainer.

Two layer plans are supported, sized by floor division of the input width:

    i3d plan:  d -> d//2 -> d//4 -> d//6
    vit plan:  d -> d//3 -> d//4 -> d//8

ReLU sits between linear layers; the bottleneck and output layers are linear.
The decoder mirrors the encoder. Training minimizes mean-squared
reconstruction error with Adam; every random draw (train/val split, He-uniform
init, batch order) comes from one Philox stream in a fixed order, so a seed
pins the final weights bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, DegenerateFitError, DimensionMismatchError
from ..features import FeatureMatrix, as_features
from ..rng import make_generator

__all__ = [
    "AeArchitecture",
    "AeModel",
    "TrainConfig",
    "ae_train",
    "ae_encode",
    "ae_reconstruct",
    "split_indices",
]

PLANS = {
    "i3d": (2, 4, 6),
    "vit": (3, 4, 8),
}


@dataclass(frozen=True)
class AeArchitecture:
    """Layer plan for an autoencoder over ``in_dim``-wide features."""

    in_dim: int
    plan: str = "i3d"

    def __post_init__(self):
        if self.plan not in PLANS:
            raise DataError(f"unknown plan {self.plan!r}; expected one of {sorted(PLANS)}")
        if min(self.dims) < 1:
            raise DataError(f"in_dim {self.in_dim} too small for plan {self.plan!r}")

    @property
    def dims(self) -> tuple[int, ...]:
        """Encoder widths, input first, bottleneck last (floor division)."""
        return (self.in_dim,) + tuple(self.in_dim // q for q in PLANS[self.plan])

    @property
    def bottleneck(self) -> int:
        return self.dims[-1]

    def layer_shapes(self) -> list[tuple[int, int]]:
        """(out, in) shapes of all linear layers, encoder then decoder."""
        dims = self.dims
        enc = [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
        dec = [(o, i) for (i, o) in reversed(enc)]
        return enc + dec


@dataclass(frozen=True)
class TrainConfig:
    """Adam training hyperparameters (conventional defaults, fully logged)."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 256
    epochs: int = 50
    val_fraction: float = 0.1

    def to_dict(self) -> dict:
        return {
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "val_fraction": self.val_fraction,
        }


@dataclass(frozen=True)
class AeModel:
    """Trained autoencoder; ``weights`` holds (W, b) per linear layer."""

    architecture: AeArchitecture
    weights: tuple
    train_stats: dict = field(default_factory=dict)

    def __post_init__(self):
        for w, b in self.weights:
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise DataError("model weights must be finite")


def _relu_flags(arch: AeArchitecture) -> list[bool]:
    # ReLU after every layer except the encoder output and the decoder output
    n_enc = len(arch.dims) - 1
    total = 2 * n_enc
    return [i != n_enc - 1 and i != total - 1 for i in range(total)]


def _forward(weights, flags, x: np.ndarray):
    h = x
    caches = []
    for (w, b), f in zip(weights, flags):
        z = h @ w.T + b
        caches.append((h, z))
        h = np.maximum(z, 0.0) if f else z
    return h, caches


def loss_and_grads(weights, flags, x: np.ndarray):
    """MSE reconstruction loss and analytic gradients per layer.

    Loss is the mean over all batch entries and feature dimensions of the
    squared reconstruction error.
    """
    out, caches = _forward(weights, flags, x)
    diff = out - x
    loss = float((diff**2).mean())
    grad = 2.0 * diff / diff.size
    grads = [None] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        h_in, z = caches[i]
        if flags[i]:
            grad = grad * (z > 0.0)
        grads[i] = (grad.T @ h_in, grad.sum(axis=0))
        if i > 0:
            grad = grad @ weights[i][0]
    return loss, grads


def split_indices(n: int, seed: int, val_fraction: float = 0.1):
    """Deterministic train/val split used by :func:`ae_train`.

    The first draw of the seed's Philox stream permutes the rows; the first
    ``round(val_fraction * n)`` (at least 1) go to validation.
    """
    rng = make_generator(seed)
    perm = rng.permutation(n)
    n_val = max(1, int(round(val_fraction * n)))
    return perm[n_val:], perm[:n_val], rng


def ae_train(x, arch: AeArchitecture, hyper: TrainConfig | None = None,
             seed: int = 0) -> AeModel:
    """Train an autoencoder on (standardized) features.

    Requires n >= 256. Keeps the weights from the epoch with the best
    validation MSE. Raises :class:`DegenerateFitError` if the loss goes
    non-finite, reporting the last finite loss.
    """
    m = as_features(x)
    if m.n < 256:
        raise DataError(f"autoencoder training needs n >= 256, got {m.n}")
    if m.d != arch.in_dim:
        raise DimensionMismatchError(
            f"architecture expects in_dim={arch.in_dim}, data has d={m.d}"
        )
    hyper = hyper or TrainConfig()
    flags = _relu_flags(arch)

    train_idx, val_idx, rng = split_indices(m.n, seed, hyper.val_fraction)
    train = m.data[train_idx]
    val = m.data[val_idx]

    # He-uniform init, biases zero; draw order is fixed (layer by layer)
    weights = []
    for out_dim, in_dim in arch.layer_shapes():
        limit = np.sqrt(6.0 / in_dim)
        weights.append(
            (rng.uniform(-limit, limit, size=(out_dim, in_dim)), np.zeros(out_dim))
        )

    adam_m = [(np.zeros_like(w), np.zeros_like(b)) for w, b in weights]
    adam_v = [(np.zeros_like(w), np.zeros_like(b)) for w, b in weights]
    step = 0
    best_val = np.inf
    best_epoch = -1
    best_weights = [(w.copy(), b.copy()) for w, b in weights]
    last_finite = None

    for epoch in range(hyper.epochs):
        order = rng.permutation(len(train))
        for start in range(0, len(train), hyper.batch_size):
            batch = train[order[start : start + hyper.batch_size]]
            loss, grads = loss_and_grads(weights, flags, batch)
            if not np.isfinite(loss):
                raise DegenerateFitError(
                    f"training diverged at epoch {epoch}; last finite loss "
                    f"{last_finite}"
                )
            last_finite = loss
            step += 1
            bc1 = 1.0 - hyper.beta1**step
            bc2 = 1.0 - hyper.beta2**step
            new_weights = []
            for i, ((w, b), (gw, gb)) in enumerate(zip(weights, grads)):
                mw, mb = adam_m[i]
                vw, vb = adam_v[i]
                mw = hyper.beta1 * mw + (1 - hyper.beta1) * gw
                mb = hyper.beta1 * mb + (1 - hyper.beta1) * gb
                vw = hyper.beta2 * vw + (1 - hyper.beta2) * gw**2
                vb = hyper.beta2 * vb + (1 - hyper.beta2) * gb**2
                adam_m[i] = (mw, mb)
                adam_v[i] = (vw, vb)
                w = w - hyper.lr * (mw / bc1) / (np.sqrt(vw / bc2) + hyper.eps)
                b = b - hyper.lr * (mb / bc1) / (np.sqrt(vb / bc2) + hyper.eps)
                new_weights.append((w, b))
            weights = new_weights
        val_out, _ = _forward(weights, flags, val)
        val_mse = float(((val_out - val) ** 2).mean())
        if not np.isfinite(val_mse):
            raise DegenerateFitError(
                f"validation loss diverged at epoch {epoch}; last finite loss "
                f"{last_finite}"
            )
        if val_mse < best_val:
            best_val = val_mse
            best_epoch = epoch
            best_weights = [(w.copy(), b.copy()) for w, b in weights]

    train_out, _ = _forward(best_weights, flags, train)
    stats = {
        "train_mse": float(((train_out - train) ** 2).mean()),
        "val_mse": best_val,
        "best_epoch": best_epoch,
        "epochs": hyper.epochs,
        "seed": seed,
    }
    return AeModel(
        architecture=arch,
        weights=tuple((w, b) for w, b in best_weights),
        train_stats=stats,
    )


def ae_encode(model: AeModel, x) -> FeatureMatrix:
    """Encoder forward pass to the bottleneck."""
    m = as_features(x)
    if m.d != model.architecture.in_dim:
        raise DimensionMismatchError(
            f"model expects d={model.architecture.in_dim}, got d={m.d}"
        )
    flags = _relu_flags(model.architecture)
    n_enc = len(model.architecture.dims) - 1
    out, _ = _forward(model.weights[:n_enc], flags[:n_enc], m.data)
    return FeatureMatrix(out, copy=False)


def ae_reconstruct(model: AeModel, x) -> FeatureMatrix:
    """Full encode-decode pass."""
    m = as_features(x)
    if m.d != model.architecture.in_dim:
        raise DimensionMismatchError(
            f"model expects d={model.architecture.in_dim}, got d={m.d}"
        )
    out, _ = _forward(model.weights, _relu_flags(model.architecture), m.data)
    return FeatureMatrix(out, copy=False)
