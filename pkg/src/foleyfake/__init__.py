"""foleyfake: detectors of synthesizer-generated environmental audio,
trained and analyzed on precomputed audio embeddings."""

from .adam import AdamState, adam_step
from .analysis import (
    CorrelationReport,
    GeneratorScore,
    TrackCorrelation,
    UTestResult,
    attach_fad_scores,
    correlate_tracks,
    load_fad_csv,
    mann_whitney_u,
    pearson_correlation,
    score_generators,
)
from .checkpoint import load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint
from .container import load_container, read_container, save_container, write_container
from .errors import (
    ConfigError,
    CorrelationError,
    DetectorError,
    FormatError,
    NumericError,
    ShapeError,
    StateError,
    TruncationError,
    ValidationError,
)
from .evaluation import (
    EvalReport,
    Prediction,
    TimingReport,
    benchmark_inference,
    evaluate,
    predict,
)
from .mlp import MlpModel, backward, bce_loss, forward, init_model, sigmoid
from .records import (
    EMBEDDING_DIMS,
    SOUND_CLASSES,
    EmbeddingRecord,
    FeatureVector,
    stack_features,
    time_average,
)
from .splits import DatasetSplit, balance_training_set, split_dataset
from .training import (
    RunManyResult,
    TrainConfig,
    TrainRunResult,
    run_many,
    train_one_run,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ConfigError",
    "CorrelationError",
    "CorrelationReport",
    "DatasetSplit",
    "DetectorError",
    "EMBEDDING_DIMS",
    "EmbeddingRecord",
    "EvalReport",
    "FeatureVector",
    "FormatError",
    "GeneratorScore",
    "MlpModel",
    "NumericError",
    "Prediction",
    "RunManyResult",
    "SOUND_CLASSES",
    "ShapeError",
    "StateError",
    "TimingReport",
    "TrackCorrelation",
    "TrainConfig",
    "TrainRunResult",
    "TruncationError",
    "UTestResult",
    "ValidationError",
    "adam_step",
    "attach_fad_scores",
    "backward",
    "balance_training_set",
    "bce_loss",
    "benchmark_inference",
    "correlate_tracks",
    "evaluate",
    "forward",
    "init_model",
    "load_checkpoint",
    "load_container",
    "load_fad_csv",
    "mann_whitney_u",
    "pearson_correlation",
    "predict",
    "read_checkpoint",
    "read_container",
    "run_many",
    "save_checkpoint",
    "save_container",
    "score_generators",
    "sigmoid",
    "split_dataset",
    "stack_features",
    "time_average",
    "train_one_run",
    "write_checkpoint",
    "write_container",
]
