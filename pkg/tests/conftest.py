from __future__ import annotations

import numpy as np
import pytest

from foleyfake.records import SOUND_CLASSES, EmbeddingRecord, FeatureVector


def make_record(
    clip_id: str,
    label: int = 0,
    sound_class: str = "rain",
    frames: int = 4,
    dim: int = 8,
    values: np.ndarray | None = None,
    generator_id: str | None = None,
    track: str | None = None,
    rng: np.random.Generator | None = None,
) -> EmbeddingRecord:
    if values is None:
        rng = rng or np.random.default_rng(abs(hash(clip_id)) % (2**32))
        values = rng.normal(size=(frames, dim)).astype(np.float32)
    if label == 1 and generator_id is None:
        generator_id = "gen_fixture"
    if label == 1 and track is None:
        track = "A"
    return EmbeddingRecord(
        clip_id=clip_id,
        sound_class=sound_class,
        label=label,
        frames=frames,
        dim=dim,
        values=values,
        generator_id=generator_id,
        track=track,
    )


def make_manifest(
    n_nonfake: int,
    n_fake: int,
    dim: int = 8,
    frames: int = 4,
    seed: int = 0,
    n_generators: int = 4,
) -> list[EmbeddingRecord]:
    """Synthetic manifest cycling through all sound classes and a few
    generators split across both tracks."""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_nonfake):
        records.append(
            make_record(
                f"real_{i:05d}",
                label=0,
                sound_class=SOUND_CLASSES[i % len(SOUND_CLASSES)],
                frames=frames,
                dim=dim,
                rng=rng,
            )
        )
    for i in range(n_fake):
        gen = i % n_generators
        records.append(
            make_record(
                f"fake_{i:05d}",
                label=1,
                sound_class=SOUND_CLASSES[i % len(SOUND_CLASSES)],
                frames=frames,
                dim=dim,
                generator_id=f"gen_{gen:02d}",
                track="A" if gen % 2 == 0 else "B",
                rng=rng,
            )
        )
    return records


def gaussian_blob_features(
    n_per_label: int,
    dim: int = 16,
    seed: int = 0,
    separation: float = 4.0,
    prefix: str = "blob",
) -> list[FeatureVector]:
    """Linearly separable synthetic features: one Gaussian blob per label."""
    rng = np.random.default_rng(seed)
    out = []
    for label in (0, 1):
        center = np.full(dim, separation if label else -separation) / np.sqrt(dim)
        for i in range(n_per_label):
            out.append(
                FeatureVector(
                    clip_id=f"{prefix}_{label}_{i:04d}",
                    label=label,
                    sound_class=SOUND_CLASSES[i % len(SOUND_CLASSES)],
                    features=center + rng.normal(size=dim),
                )
            )
    return out


def gaussian_blob_records(
    n_per_label: int,
    dim: int = 16,
    frames: int = 4,
    seed: int = 0,
    separation: float = 4.0,
) -> list[EmbeddingRecord]:
    """Blob dataset as embedding records whose time average is the blob
    point plus zero-mean per-frame jitter."""
    rng = np.random.default_rng(seed)
    records = []
    for label in (0, 1):
        center = np.full(dim, separation if label else -separation) / np.sqrt(dim)
        for i in range(n_per_label):
            point = center + rng.normal(size=dim)
            jitter = rng.normal(scale=0.05, size=(frames, dim))
            jitter -= jitter.mean(axis=0)
            gen = i % 6
            records.append(
                EmbeddingRecord(
                    clip_id=f"clip_{label}_{i:05d}",
                    sound_class=SOUND_CLASSES[i % len(SOUND_CLASSES)],
                    label=label,
                    frames=frames,
                    dim=dim,
                    values=(point + jitter).astype(np.float32),
                    generator_id=f"gen_{gen:02d}" if label else None,
                    track=("A" if gen % 2 == 0 else "B") if label else None,
                )
            )
    return records


@pytest.fixture
def small_manifest() -> list[EmbeddingRecord]:
    return make_manifest(n_nonfake=40, n_fake=100, dim=6, seed=7)


def oracle_model(dim: int):
    """Hand-built detector that thresholds the summed features' sign,
    perfect on well-separated blob data."""
    from foleyfake.mlp import init_model

    model = init_model(dim=dim, dropout_p=0.0, seed=0, hidden_dims=(2, 2, 2))
    # unit 0 carries +sum(x), unit 1 carries -sum(x); ReLU keeps one alive
    model.weights[0][:, :] = 0.0
    model.weights[0][:, 0] = 1.0
    model.weights[0][:, 1] = -1.0
    for layer in (1, 2):
        model.weights[layer][:, :] = 0.0
        model.weights[layer][0, 0] = 1.0
        model.weights[layer][1, 1] = 1.0
    model.weights[3][:, :] = 0.0
    model.weights[3][0, 0] = 50.0
    model.weights[3][1, 0] = -50.0
    for b in model.biases:
        b[:] = 0.0
    return model


def constant_model(dim: int):
    """Always outputs sigmoid(0) = 0.5."""
    from foleyfake.mlp import init_model

    model = init_model(dim=dim, dropout_p=0.0, seed=0, hidden_dims=(2, 2, 2))
    for w in model.weights:
        w[:] = 0.0
    for b in model.biases:
        b[:] = 0.0
    return model
