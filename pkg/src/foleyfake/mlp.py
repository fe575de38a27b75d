"""From-scratch dense network for the binary fake/nonfake decision.

Four linear layers (dim -> 512 -> 1024 -> 512 -> 1 by default), the first
three each followed by ReLU and inverted dropout, the last by a sigmoid.
Forward, backward, and the loss are all plain numpy in float64; no
autograd framework is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, ShapeError, StateError

DEFAULT_HIDDEN_DIMS = (512, 1024, 512)
BCE_EPS = 1e-7


@dataclass
class MlpModel:
    """Parameters of the detector head. Weights are (fan_in, fan_out)."""

    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    dropout_p: float

    @property
    def dim(self) -> int:
        """Input dimensionality (the embedding dim)."""
        return self.layer_dims[0]

    def copy(self) -> "MlpModel":
        return MlpModel(
            layer_dims=self.layer_dims,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            dropout_p=self.dropout_p,
        )

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)


def init_model(
    dim: int,
    dropout_p: float = 0.2,
    seed: int = 0,
    hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN_DIMS,
) -> MlpModel:
    """He-uniform initialization: W ~ U(+-sqrt(6/fan_in)), zero biases.

    Deterministic per seed. ``hidden_dims`` defaults to the production
    architecture; tests shrink it so exhaustive gradient checks stay fast.
    """
    if dim <= 0:
        raise ConfigError(f"embedding dim must be positive, got {dim}")
    if not 0.0 <= dropout_p < 1.0:
        raise ConfigError(f"dropout_p must lie in [0, 1), got {dropout_p}")
    if len(hidden_dims) != 3 or any(h <= 0 for h in hidden_dims):
        raise ConfigError(f"hidden_dims must be 3 positive widths, got {hidden_dims}")

    layer_dims = (dim, *hidden_dims, 1)
    rng = np.random.Generator(np.random.PCG64(seed))
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        bound = math.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return MlpModel(layer_dims=layer_dims, weights=weights, biases=biases, dropout_p=dropout_p)


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ForwardCache:
    """Everything backward needs: inputs, pre-activations, post-dropout
    activations, the dropout masks that were applied, and the output."""

    model: MlpModel
    x: np.ndarray
    zs: list[np.ndarray]
    acts: list[np.ndarray]
    masks: list[np.ndarray | None]
    likelihoods: np.ndarray
    mode: str


def forward(
    model: MlpModel,
    batch: np.ndarray,
    mode: str = "eval",
    dropout_seed: int | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Run the network on an (n, dim) batch.

    Train mode applies inverted dropout (zero with probability p, scale
    survivors by 1/(1-p)) so eval mode needs no rescaling and is a pure
    function of (model, batch).
    """
    if mode not in ("train", "eval"):
        raise ConfigError(f"mode must be 'train' or 'eval', got {mode!r}")
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != model.dim:
        raise ShapeError(
            f"batch shape {batch.shape} incompatible with model input dim {model.dim}"
        )

    apply_dropout = mode == "train" and model.dropout_p > 0.0
    rng = (
        np.random.Generator(np.random.PCG64(dropout_seed))
        if apply_dropout
        else None
    )

    h = batch
    zs: list[np.ndarray] = []
    acts: list[np.ndarray] = []
    masks: list[np.ndarray | None] = []
    n_hidden = len(model.weights) - 1
    for layer in range(n_hidden):
        z = h @ model.weights[layer] + model.biases[layer]
        a = np.maximum(z, 0.0)
        if apply_dropout:
            keep = rng.random(a.shape) >= model.dropout_p
            mask = keep / (1.0 - model.dropout_p)
            a = a * mask
        else:
            mask = None
        zs.append(z)
        acts.append(a)
        masks.append(mask)
        h = a

    z_out = h @ model.weights[-1] + model.biases[-1]
    zs.append(z_out)
    likelihoods = sigmoid(z_out)[:, 0]
    cache = ForwardCache(
        model=model, x=batch, zs=zs, acts=acts, masks=masks,
        likelihoods=likelihoods, mode=mode,
    )
    return likelihoods, cache


def bce_loss(y, y_hat) -> float:
    """Binary cross-entropy -(y log yh + (1-y) log(1-yh)), mean over a batch.

    Each log argument is floored at 1e-7, so perfect predictions score
    exactly 0 and the loss is bounded by -ln(1e-7) ~= 16.118.
    """
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    loss = -(
        y * np.log(np.maximum(y_hat, BCE_EPS))
        + (1.0 - y) * np.log(np.maximum(1.0 - y_hat, BCE_EPS))
    )
    return float(np.mean(loss))


def backward(
    model: MlpModel,
    cache: ForwardCache,
    y: np.ndarray,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact gradients of the mean BCE w.r.t. every weight and bias.

    Reuses the dropout masks recorded by the forward pass; the sigmoid and
    loss collapse to the usual (sigma(z) - y) / n at the output.
    """
    if cache.model is not model:
        raise StateError("cache was produced by a different model")
    if cache.mode != "train":
        raise StateError("backward needs a cache from a train-mode forward pass")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = cache.x.shape[0]
    if y.shape[0] != n:
        raise ShapeError(f"labels length {y.shape[0]} != batch size {n}")

    grads: list[tuple[np.ndarray, np.ndarray] | None] = [None] * len(model.weights)
    delta = ((cache.likelihoods - y) / n)[:, None]

    last = len(model.weights) - 1
    a_prev = cache.acts[last - 1] if last > 0 else cache.x
    grads[last] = (a_prev.T @ delta, delta.sum(axis=0))
    d_act = delta @ model.weights[last].T

    for layer in range(last - 1, -1, -1):
        if cache.masks[layer] is not None:
            d_act = d_act * cache.masks[layer]
        dz = d_act * (cache.zs[layer] > 0.0)
        a_prev = cache.acts[layer - 1] if layer > 0 else cache.x
        grads[layer] = (a_prev.T @ dz, dz.sum(axis=0))
        if layer > 0:
            d_act = dz @ model.weights[layer].T

    return grads  # type: ignore[return-value]


def check_finite_gradients(grads: list[tuple[np.ndarray, np.ndarray]]) -> None:
    for layer, (dw, db) in enumerate(grads):
        if not np.isfinite(dw).all():
            raise NumericError(f"non-finite gradient in layer {layer} weights")
        if not np.isfinite(db).all():
            raise NumericError(f"non-finite gradient in layer {layer} biases")
