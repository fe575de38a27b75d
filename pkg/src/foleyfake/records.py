"""Core data records: per-clip embedding matrices and their time-averaged
feature vectors.

An :class:`EmbeddingRecord` holds one audio clip's frame-wise embedding
matrix (one row per second of audio) together with its ground truth and
provenance. :func:`time_average` collapses it to the single vector the
detector consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

SOUND_CLASSES = (
    "dog_bark",
    "footstep",
    "gunshot",
    "keyboard",
    "moving_motor_vehicle",
    "rain",
    "sneeze_cough",
)

TRACKS = ("A", "B")

#: Embedding dimensionality per supported extractor, keyed by canonical tag.
EMBEDDING_DIMS = {
    "vggish": 128,
    "ms-clap": 1024,
    "pann-wavegram-logmel": 2048,
    "pann-cnn14-32k": 2048,
}

LABEL_NONFAKE = 0
LABEL_FAKE = 1


@dataclass
class EmbeddingRecord:
    """One clip's frames x dim embedding matrix plus labels and provenance.

    ``generator_id`` and ``track`` are present exactly when the clip is
    fake (label 1). ``values`` is stored as float32, the container's
    on-disk precision.
    """

    clip_id: str
    sound_class: str
    label: int
    frames: int
    dim: int
    values: np.ndarray
    generator_id: str | None = None
    track: str | None = None

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=np.float32)

    def validate(self) -> None:
        """Raise ValidationError unless every record invariant holds."""
        if not self.clip_id:
            raise ValidationError("clip_id must be a non-empty string")
        if self.sound_class not in SOUND_CLASSES:
            raise ValidationError(
                f"{self.clip_id}: unknown sound_class {self.sound_class!r}"
            )
        if self.label not in (LABEL_NONFAKE, LABEL_FAKE):
            raise ValidationError(f"{self.clip_id}: label must be 0 or 1, got {self.label!r}")
        if self.frames <= 0 or self.dim <= 0:
            raise ValidationError(
                f"{self.clip_id}: frames and dim must be positive, got "
                f"frames={self.frames}, dim={self.dim}"
            )
        if self.values.shape != (self.frames, self.dim):
            raise ValidationError(
                f"{self.clip_id}: values shape {self.values.shape} does not match "
                f"(frames, dim) = ({self.frames}, {self.dim})"
            )
        if not np.isfinite(self.values).all():
            raise ValidationError(f"{self.clip_id}: values contain non-finite entries")
        if self.label == LABEL_FAKE:
            if self.generator_id is None or self.track is None:
                raise ValidationError(
                    f"{self.clip_id}: fake records need generator_id and track"
                )
            if self.track not in TRACKS:
                raise ValidationError(f"{self.clip_id}: track must be A or B, got {self.track!r}")
        else:
            if self.generator_id is not None or self.track is not None:
                raise ValidationError(
                    f"{self.clip_id}: nonfake records must not carry generator_id or track"
                )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingRecord):
            return NotImplemented
        return (
            self.clip_id == other.clip_id
            and self.sound_class == other.sound_class
            and self.label == other.label
            and self.generator_id == other.generator_id
            and self.track == other.track
            and self.frames == other.frames
            and self.dim == other.dim
            and np.array_equal(self.values, other.values)
        )


@dataclass
class FeatureVector:
    """Time-averaged representation of one clip: a single length-dim vector."""

    clip_id: str
    label: int
    sound_class: str
    features: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)

    @property
    def dim(self) -> int:
        return int(self.features.shape[0])


def time_average(record: EmbeddingRecord) -> FeatureVector:
    """Collapse a frames x dim matrix to its per-dimension mean over time.

    Averaging is done in float64 regardless of the record's storage
    precision; labels and metadata carry through unchanged.
    """
    record.validate()
    features = record.values.astype(np.float64).mean(axis=0)
    return FeatureVector(
        clip_id=record.clip_id,
        label=record.label,
        sound_class=record.sound_class,
        features=features,
    )


def stack_features(
    vectors: list[FeatureVector],
) -> tuple[np.ndarray, np.ndarray]:
    """Stack feature vectors into an (n, dim) matrix and an (n,) label array."""
    if not vectors:
        raise ValidationError("cannot stack an empty feature list")
    X = np.stack([v.features for v in vectors]).astype(np.float64)
    y = np.array([v.label for v in vectors], dtype=np.float64)
    return X, y
