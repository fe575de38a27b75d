from __future__ import annotations

import io

import numpy as np
import pytest

from foleyfake.adam import AdamState, adam_step
from foleyfake.checkpoint import (
    load_checkpoint,
    read_checkpoint,
    save_checkpoint,
    write_checkpoint,
)
from foleyfake.errors import FormatError, TruncationError
from foleyfake.mlp import backward, forward, init_model


def trained_pair():
    model = init_model(dim=5, dropout_p=0.15, seed=3, hidden_dims=(6, 7, 6))
    state = AdamState.for_model(model, lr=1e-3)
    rng = np.random.default_rng(1)
    for _ in range(4):
        x = rng.normal(size=(8, 5))
        y = rng.integers(0, 2, size=8).astype(float)
        _, cache = forward(model, x, mode="train", dropout_seed=int(rng.integers(2**31)))
        adam_step(model, state, backward(model, cache, y))
    return model, state


def assert_models_equal(a, b):
    assert a.layer_dims == b.layer_dims
    assert a.dropout_p == b.dropout_p
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    for ba, bb in zip(a.biases, b.biases):
        assert np.array_equal(ba, bb)


def test_roundtrip_model_only(tmp_path):
    model, _ = trained_pair()
    path = tmp_path / "m.mlpc"
    save_checkpoint(model, path)
    restored, state = load_checkpoint(path)
    assert state is None
    assert_models_equal(model, restored)


def test_roundtrip_with_adam_state(tmp_path):
    model, state = trained_pair()
    path = tmp_path / "m.mlpc"
    save_checkpoint(model, path, adam_state=state)
    restored_model, restored_state = load_checkpoint(path)
    assert_models_equal(model, restored_model)
    assert restored_state is not None
    assert restored_state.t == state.t
    assert (restored_state.lr, restored_state.beta1, restored_state.beta2, restored_state.eps) == (
        state.lr,
        state.beta1,
        state.beta2,
        state.eps,
    )
    for (ma, mb), (ra, rb) in zip(state.m, restored_state.m):
        assert np.array_equal(ma, ra) and np.array_equal(mb, rb)
    for (va, vb), (ra, rb) in zip(state.v, restored_state.v):
        assert np.array_equal(va, ra) and np.array_equal(vb, rb)


def test_save_is_deterministic(tmp_path):
    model, state = trained_pair()
    a, b = tmp_path / "a.mlpc", tmp_path / "b.mlpc"
    save_checkpoint(model, a, adam_state=state)
    save_checkpoint(model, b, adam_state=state)
    assert a.read_bytes() == b.read_bytes()


def test_restored_model_predicts_identically(tmp_path):
    model, _ = trained_pair()
    path = tmp_path / "m.mlpc"
    save_checkpoint(model, path)
    restored, _ = load_checkpoint(path)
    x = np.random.default_rng(9).normal(size=(10, 5))
    original, _ = forward(model, x, mode="eval")
    back, _ = forward(restored, x, mode="eval")
    assert np.array_equal(original, back)


def test_bad_magic_rejected():
    model, _ = trained_pair()
    buffer = io.BytesIO()
    write_checkpoint(model, buffer)
    data = bytearray(buffer.getvalue())
    data[:4] = b"NOPE"
    with pytest.raises(FormatError):
        read_checkpoint(io.BytesIO(bytes(data)))


def test_truncated_checkpoint_rejected():
    model, _ = trained_pair()
    buffer = io.BytesIO()
    write_checkpoint(model, buffer)
    with pytest.raises(TruncationError):
        read_checkpoint(io.BytesIO(buffer.getvalue()[:-10]))
