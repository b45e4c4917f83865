"""Network architecture: a recurrent encoder over token sequences with a
bounded low-dimensional bottleneck and a binary classification head.

The trained bottleneck is the product: `truncate_to_latent` cuts the
network at the tanh layer, so every extracted feature lies in [-1, 1] and
can be written straight into a phase-encoding classifier downstream.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any

from .exceptions import ConfigurationError, ExportError

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import keras  # noqa: E402
from keras import layers  # noqa: E402

LATENT_LAYER = "latent"

# Layer names are fixed so weight paths stay stable across processes.
_LAYER_ORDER = (
    "embedding",
    "recurrent",
    "dropout",
    "sequence_dense",
    "flatten",
    LATENT_LAYER,
    "hidden_1",
    "hidden_2",
    "output",
)


@dataclass(frozen=True)
class ArchitectureConfig:
    """Shape of the sequence classifier.

    Defaults match the bundled SMILES encoding: 34 token values, length
    139. The latent width is restricted to 2 or 4, the two sizes the
    downstream circuit encodes. The two hidden widths and the dropout
    position are free choices; they are echoed into every training log.
    """

    vocab_size: int = 34
    sequence_length: int = 139
    embedding_dim: int = 15
    recurrent_units: int = 20
    sequence_dense_units: int = 20
    latent_dim: int = 2
    hidden_units: tuple[int, int] = (32, 16)
    dropout_rate: float = 0.0

    def __post_init__(self) -> None:
        for name in (
            "vocab_size",
            "sequence_length",
            "embedding_dim",
            "recurrent_units",
            "sequence_dense_units",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if self.latent_dim not in (2, 4):
            raise ConfigurationError(f"latent_dim must be 2 or 4, got {self.latent_dim!r}")
        hidden = tuple(self.hidden_units)
        if len(hidden) != 2 or any(not isinstance(h, int) or h < 1 for h in hidden):
            raise ConfigurationError(
                f"hidden_units must be two positive integers, got {self.hidden_units!r}"
            )
        object.__setattr__(self, "hidden_units", hidden)
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigurationError(
                f"dropout_rate must lie in [0, 1), got {self.dropout_rate!r}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "vocab_size": self.vocab_size,
            "sequence_length": self.sequence_length,
            "embedding_dim": self.embedding_dim,
            "recurrent_units": self.recurrent_units,
            "sequence_dense_units": self.sequence_dense_units,
            "latent_dim": self.latent_dim,
            "hidden_units": list(self.hidden_units),
            "dropout_rate": self.dropout_rate,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ArchitectureConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown architecture keys: {sorted(unknown)}")
        if "hidden_units" in doc:
            doc = {**doc, "hidden_units": tuple(doc["hidden_units"])}
        return cls(**doc)


def build_network(arch: ArchitectureConfig | None = None) -> keras.Model:
    """Assemble the full classifier.

    Token sequence -> embedding -> bidirectional recurrent layer ->
    dropout -> per-step dense -> flatten -> tanh bottleneck -> two ReLU
    layers -> sigmoid. The bottleneck layer is named so it can be found
    again after serialization.
    """
    arch = arch or ArchitectureConfig()
    inputs = keras.Input(shape=(arch.sequence_length,), dtype="int64", name="tokens")
    h = layers.Embedding(arch.vocab_size, arch.embedding_dim, name="embedding")(inputs)
    # Inner layers get explicit names too: auto-generated ones depend on
    # process-global counters and would break weight-path stability.
    h = layers.Bidirectional(
        layers.LSTM(arch.recurrent_units, return_sequences=True, name="steps"),
        name="recurrent",
    )(h)
    h = layers.Dropout(arch.dropout_rate, name="dropout")(h)
    h = layers.TimeDistributed(
        layers.Dense(arch.sequence_dense_units, name="step_dense"), name="sequence_dense"
    )(h)
    h = layers.Flatten(name="flatten")(h)
    latent = layers.Dense(arch.latent_dim, activation="tanh", name=LATENT_LAYER)(h)
    h = layers.Dense(arch.hidden_units[0], activation="relu", name="hidden_1")(latent)
    h = layers.Dense(arch.hidden_units[1], activation="relu", name="hidden_2")(h)
    outputs = layers.Dense(1, activation="sigmoid", name="output")(h)
    return keras.Model(inputs, outputs, name="sequence_classifier")


def truncate_to_latent(model: keras.Model) -> keras.Model:
    """Cut the classifier at the tanh bottleneck.

    The returned model shares the original's layers and weights, so its
    outputs equal the full network's activations at that layer exactly.

    Raises:
        ExportError: the model has no bottleneck layer to cut at.
    """
    try:
        latent = model.get_layer(LATENT_LAYER)
    except ValueError as exc:
        raise ExportError(f"model has no {LATENT_LAYER!r} layer to truncate at") from exc
    return keras.Model(model.input, latent.output, name="feature_extractor")
