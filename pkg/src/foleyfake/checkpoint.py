"""MLPC checkpoint files: model parameters, optionally with optimizer state.

Layout (little-endian):

    magic      4 bytes  b"MLPC"
    version    u32      currently 1
    n_dims     u32      number of entries in layer_dims
    layer_dims u32 * n_dims
    dropout_p  f64
    has_adam   u8       0 or 1
    per layer: W (fan_in*fan_out f64, row-major), b (fan_out f64)
    if has_adam:
        t u64; lr, beta1, beta2, eps f64
        m then v arrays, same layout as the parameters

Parameters are stored at full 64-bit precision so a save/load round-trip
is bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .adam import AdamState
from .errors import FormatError, TruncationError
from .mlp import MlpModel

MAGIC = b"MLPC"
VERSION = 1


def write_checkpoint(
    model: MlpModel, destination: BinaryIO, adam_state: AdamState | None = None
) -> int:
    written = destination.write(MAGIC)
    written += destination.write(struct.pack("<II", VERSION, len(model.layer_dims)))
    written += destination.write(struct.pack(f"<{len(model.layer_dims)}I", *model.layer_dims))
    written += destination.write(struct.pack("<dB", model.dropout_p, 1 if adam_state else 0))
    written += _write_params(destination, model.weights, model.biases)
    if adam_state is not None:
        written += destination.write(
            struct.pack(
                "<Qdddd",
                adam_state.t,
                adam_state.lr,
                adam_state.beta1,
                adam_state.beta2,
                adam_state.eps,
            )
        )
        for moments in (adam_state.m, adam_state.v):
            written += _write_params(
                destination, [m[0] for m in moments], [m[1] for m in moments]
            )
    return written


def read_checkpoint(source: BinaryIO) -> tuple[MlpModel, AdamState | None]:
    magic = _read_exact(source, 4, "checkpoint magic")
    if magic != MAGIC:
        raise FormatError(f"bad checkpoint magic {magic!r}, expected {MAGIC!r}")
    version, n_dims = struct.unpack("<II", _read_exact(source, 8, "checkpoint header"))
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    layer_dims = struct.unpack(
        f"<{n_dims}I", _read_exact(source, 4 * n_dims, "layer dims")
    )
    dropout_p, has_adam = struct.unpack("<dB", _read_exact(source, 9, "flags"))

    weights, biases = _read_params(source, layer_dims)
    model = MlpModel(
        layer_dims=tuple(int(d) for d in layer_dims),
        weights=weights,
        biases=biases,
        dropout_p=dropout_p,
    )
    state: AdamState | None = None
    if has_adam:
        t, lr, beta1, beta2, eps = struct.unpack(
            "<Qdddd", _read_exact(source, 8 * 5, "adam hyperparameters")
        )
        mw, mb = _read_params(source, layer_dims)
        vw, vb = _read_params(source, layer_dims)
        state = AdamState(
            lr=lr, beta1=beta1, beta2=beta2, eps=eps, t=t,
            m=list(zip(mw, mb)), v=list(zip(vw, vb)),
        )
    return model, state


def save_checkpoint(
    model: MlpModel, path: str | Path, adam_state: AdamState | None = None
) -> int:
    with open(path, "wb") as handle:
        return write_checkpoint(model, handle, adam_state)


def load_checkpoint(path: str | Path) -> tuple[MlpModel, AdamState | None]:
    with open(path, "rb") as handle:
        return read_checkpoint(handle)


def _write_params(
    destination: BinaryIO, weights: list[np.ndarray], biases: list[np.ndarray]
) -> int:
    written = 0
    for w, b in zip(weights, biases):
        written += destination.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        written += destination.write(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return written


def _read_params(
    source: BinaryIO, layer_dims: tuple[int, ...]
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        raw = _read_exact(source, fan_in * fan_out * 8, "weight matrix")
        weights.append(np.frombuffer(raw, dtype="<f8").reshape(fan_in, fan_out).copy())
        raw = _read_exact(source, fan_out * 8, "bias vector")
        biases.append(np.frombuffer(raw, dtype="<f8").copy())
    return weights, biases


def _read_exact(source: BinaryIO, size: int, what: str) -> bytes:
    data = source.read(size)
    if len(data) != size:
        raise TruncationError(
            f"checkpoint truncated while reading {what}: wanted {size} bytes, got {len(data)}"
        )
    return data
