"""Recurrent feature extractor for encoded token sequences.

Trains a bidirectional-LSTM classifier with a bounded tanh bottleneck on
integer token rows, then exports the bottleneck activations as compact
feature vectors. Files cross the boundary in two CSV schemas: encoded
tokens in (`id,t0,...,label`), extracted features out (`id,x1,...,label`),
labels -1/+1 in both.
"""

from .artifacts import (
    export_latent,
    load_model,
    read_encoded_csv,
    save_model,
    write_encoded_csv,
    write_features_csv,
    write_training_log,
)
from .exceptions import (
    ConfigurationError,
    DataError,
    ExportError,
    ExtractorError,
    TrainingError,
)
from .network import ArchitectureConfig, build_network, truncate_to_latent
from .training import (
    SplitIndices,
    TrainingConfig,
    TrainingResult,
    split_dataset,
    synthetic_token_dataset,
    train_extractor,
)

__version__ = "0.1.0"

__all__ = [
    "ArchitectureConfig",
    "ConfigurationError",
    "DataError",
    "ExportError",
    "ExtractorError",
    "SplitIndices",
    "TrainingConfig",
    "TrainingError",
    "TrainingResult",
    "build_network",
    "export_latent",
    "load_model",
    "read_encoded_csv",
    "save_model",
    "split_dataset",
    "synthetic_token_dataset",
    "train_extractor",
    "truncate_to_latent",
    "write_encoded_csv",
    "write_features_csv",
    "write_training_log",
]
