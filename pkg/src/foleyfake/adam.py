"""Adam optimizer with bias correction.

    m <- b1*m + (1-b1)*g        mhat = m / (1 - b1^t)
    v <- b2*v + (1-b2)*g^2      vhat = v / (1 - b2^t)
    theta <- theta - lr * mhat / (sqrt(vhat) + eps)

The protocol's learning rate (7e-4) is the default; b1/b2/eps are the
optimizer's canonical values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ShapeError
from .mlp import MlpModel

DEFAULT_LR = 7e-4


@dataclass
class AdamState:
    """Step count and first/second moment accumulators, parameter-shaped."""

    lr: float = DEFAULT_LR
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    v: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @classmethod
    def for_model(cls, model: MlpModel, lr: float = DEFAULT_LR) -> "AdamState":
        zeros = lambda: [
            (np.zeros_like(w), np.zeros_like(b))
            for w, b in zip(model.weights, model.biases)
        ]
        return cls(lr=lr, m=zeros(), v=zeros())


def adam_step(
    model: MlpModel,
    state: AdamState,
    grads: list[tuple[np.ndarray, np.ndarray]],
) -> None:
    """Apply one Adam update in place, advancing state.t by one."""
    if len(grads) != len(model.weights) or len(state.m) != len(model.weights):
        raise ShapeError("gradient/state layer count does not match the model")
    for layer, (dw, db) in enumerate(grads):
        if dw.shape != model.weights[layer].shape or db.shape != model.biases[layer].shape:
            raise ShapeError(f"layer {layer} gradient shapes do not match the parameters")
        if not (np.isfinite(dw).all() and np.isfinite(db).all()):
            raise NumericError(f"non-finite gradient in layer {layer}")

    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for layer, (dw, db) in enumerate(grads):
        for param, grad, m, v in (
            (model.weights[layer], dw, state.m[layer][0], state.v[layer][0]),
            (model.biases[layer], db, state.m[layer][1], state.v[layer][1]),
        ):
            m *= state.beta1
            m += (1.0 - state.beta1) * grad
            v *= state.beta2
            v += (1.0 - state.beta2) * np.square(grad)
            param -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
