from __future__ import annotations

import numpy as np
import pytest

from foleyfake.adam import AdamState, adam_step
from foleyfake.errors import NumericError, ShapeError
from foleyfake.mlp import init_model


def zeroed_model():
    model = init_model(dim=3, dropout_p=0.0, seed=0, hidden_dims=(4, 5, 4))
    for w in model.weights:
        w[:] = 0.0
    return model


def unit_grads(model):
    return [(np.ones_like(w), np.ones_like(b)) for w, b in zip(model.weights, model.biases)]


def test_first_step_hand_computed():
    # m_hat = v_hat = 1 after one step on g = 1, so theta = -lr / (1 + eps)
    model = zeroed_model()
    state = AdamState.for_model(model, lr=7e-4)
    adam_step(model, state, unit_grads(model))
    expected = -7e-4 / (1.0 + 1e-8)
    assert state.t == 1
    for w, b in zip(model.weights, model.biases):
        np.testing.assert_allclose(w, expected, rtol=0, atol=1e-15)
        np.testing.assert_allclose(b, expected, rtol=0, atol=1e-15)


def test_zero_gradient_keeps_parameters():
    model = zeroed_model()
    before = [w.copy() for w in model.weights]
    state = AdamState.for_model(model)
    grads = [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)]
    adam_step(model, state, grads)
    for w, orig in zip(model.weights, before):
        assert np.array_equal(w, orig)
    assert state.t == 1


def test_identical_gradient_histories_update_identically():
    model = zeroed_model()
    state = AdamState.for_model(model)
    rng = np.random.default_rng(0)
    for _ in range(5):
        g = float(rng.normal())
        grads = [
            (np.full_like(w, g), np.full_like(b, g))
            for w, b in zip(model.weights, model.biases)
        ]
        adam_step(model, state, grads)
    # every element shared the same history, so all must be equal
    flat = np.concatenate([w.ravel() for w in model.weights])
    assert np.all(flat == flat[0])


def test_nonfinite_gradient_names_layer():
    model = zeroed_model()
    state = AdamState.for_model(model)
    grads = unit_grads(model)
    grads[2] = (grads[2][0] * np.nan, grads[2][1])
    with pytest.raises(NumericError, match="layer 2"):
        adam_step(model, state, grads)


def test_shape_mismatch_rejected():
    model = zeroed_model()
    state = AdamState.for_model(model)
    grads = unit_grads(model)
    grads[0] = (np.ones((2, 2)), grads[0][1])
    with pytest.raises(ShapeError):
        adam_step(model, state, grads)


def test_moments_track_gradient_magnitude():
    model = zeroed_model()
    state = AdamState.for_model(model)
    for _ in range(3):
        adam_step(model, state, unit_grads(model))
    assert state.t == 3
    for (mw, mb), (vw, vb) in zip(state.m, state.v):
        assert np.all(vw >= 0) and np.all(vb >= 0)
        assert np.all(mw > 0) and np.all(mb > 0)
