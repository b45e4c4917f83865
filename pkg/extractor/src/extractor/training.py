"""Training loop for the sequence classifier.

Labels cross the package boundary as -1/+1 integers (the CSV convention
shared with the downstream pipeline) and are remapped to 0/1 only around
the sigmoid head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from sklearn.model_selection import train_test_split

from .exceptions import ConfigurationError, TrainingError
from .network import ArchitectureConfig, build_network

import keras  # noqa: E402
import tensorflow as tf  # noqa: E402


@dataclass(frozen=True)
class TrainingConfig:
    """Optimizer and schedule settings.

    The holdout fractions carve the dataset into train/validation/test;
    the defaults give 80:10:10. Early stopping watches validation loss
    and restores the best-epoch weights when it fires.
    """

    learning_rate: float = 0.001
    max_epochs: int = 100
    patience: int = 15
    batch_size: int = 32
    validation_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 0
    deterministic: bool = True

    def __post_init__(self) -> None:
        if not self.learning_rate > 0.0:
            raise ConfigurationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ConfigurationError(f"max_epochs must be at least 1, got {self.max_epochs}")
        if self.patience < 1:
            raise ConfigurationError(f"patience must be at least 1, got {self.patience}")
        if self.patience >= self.max_epochs:
            raise ConfigurationError(
                f"patience must be smaller than max_epochs, "
                f"got patience={self.patience}, max_epochs={self.max_epochs}"
            )
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be at least 1, got {self.batch_size}")
        for name in ("validation_fraction", "test_fraction"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {value}")
        if self.validation_fraction + self.test_fraction >= 1.0:
            raise ConfigurationError(
                "validation_fraction and test_fraction must leave room for training data"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "learning_rate": self.learning_rate,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "batch_size": self.batch_size,
            "validation_fraction": self.validation_fraction,
            "test_fraction": self.test_fraction,
            "seed": self.seed,
            "deterministic": self.deterministic,
        }


@dataclass(frozen=True)
class SplitIndices:
    """Row indices of the three stratified subsets."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray


@dataclass
class TrainingResult:
    """A trained model together with everything the logs need."""

    model: Any
    architecture: ArchitectureConfig
    config: TrainingConfig
    epochs_run: int
    metrics: dict[str, float]
    history: dict[str, list[float]] = field(default_factory=dict)
    split: SplitIndices | None = None


def synthetic_token_dataset(
    n: int, seed: int = 0, sequence_length: int = 139, vocab_size: int = 34
) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Generate a balanced, separable token corpus for exercising the stack.

    Each row is a zero-padded random token run of length 20 to 79 where a
    third of the positions carry a class marker (token 19 for +1, token 29
    for -1), so the labels are learnable from content rather than only
    memorizable. Deterministic in the seed.
    """
    if n < 2:
        raise TrainingError(f"need at least 2 samples, got {n}")
    rng = np.random.default_rng(seed)
    tokens = np.zeros((n, sequence_length), dtype=np.int64)
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        positive = i % 2 == 0
        run = int(rng.integers(20, 80))
        seq = rng.integers(1, vocab_size, size=run)
        marker = 19 if positive else 29
        chosen = rng.choice(run, size=max(1, run // 3), replace=False)
        seq[chosen] = marker
        tokens[i, :run] = seq
        labels[i] = 1 if positive else -1
    order = rng.permutation(n)
    ids = tuple(f"synth-{i:04d}" for i in order)
    return ids, tokens[order], labels[order]


def split_dataset(labels: np.ndarray, config: TrainingConfig) -> SplitIndices:
    """Stratified train/validation/test indices per the config fractions.

    Raises:
        TrainingError: fewer than two classes, or a class too small to
            appear in every subset.
    """
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.size != 2:
        raise TrainingError(f"need exactly two classes, got {classes.tolist()}")
    indices = np.arange(labels.size)
    try:
        rest, test = train_test_split(
            indices,
            test_size=config.test_fraction,
            stratify=labels,
            random_state=config.seed,
        )
        # Validation fraction is stated over the whole set, so rescale.
        val_share = config.validation_fraction / (1.0 - config.test_fraction)
        train, val = train_test_split(
            rest,
            test_size=val_share,
            stratify=labels[rest],
            random_state=config.seed,
        )
    except ValueError as exc:
        raise TrainingError(f"stratified split failed: {exc}") from exc
    return SplitIndices(train=train, validation=val, test=test)


def _check_inputs(tokens: np.ndarray, labels: np.ndarray, arch: ArchitectureConfig) -> None:
    if tokens.ndim != 2 or tokens.shape[1] != arch.sequence_length:
        raise TrainingError(
            f"token matrix must be (N, {arch.sequence_length}), got {tokens.shape}"
        )
    if labels.shape != (tokens.shape[0],):
        raise TrainingError(
            f"labels must be one per row, got {labels.shape} for {tokens.shape[0]} rows"
        )
    if tokens.min(initial=0) < 0 or tokens.max(initial=0) >= arch.vocab_size:
        raise TrainingError(
            f"token values must lie in [0, {arch.vocab_size}), "
            f"got range [{tokens.min()}, {tokens.max()}]"
        )
    bad = set(np.unique(labels)) - {-1, 1}
    if bad:
        raise TrainingError(f"labels must be -1 or +1, got extras {sorted(bad)}")


def _accuracy(model, tokens: np.ndarray, labels: np.ndarray, batch_size: int) -> float:
    scores = model.predict(tokens, batch_size=batch_size, verbose=0).reshape(-1)
    predicted = np.where(scores >= 0.5, 1, -1)
    return float(np.mean(predicted == labels))


def train_extractor(
    tokens: np.ndarray,
    labels: np.ndarray,
    arch: ArchitectureConfig | None = None,
    config: TrainingConfig | None = None,
) -> TrainingResult:
    """Fit the classifier on -1/+1 labeled token rows.

    Seeds the process-global RNGs for reproducibility; with
    `deterministic` set (the default) kernel-level determinism is switched
    on as well, so two runs with one seed produce identical losses.

    Raises:
        TrainingError: single-class data, shape mismatch, or token values
            outside the vocabulary.
    """
    arch = arch or ArchitectureConfig()
    config = config or TrainingConfig()
    tokens = np.asarray(tokens, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    _check_inputs(tokens, labels, arch)
    split = split_dataset(labels, config)

    keras.utils.set_random_seed(config.seed)
    if config.deterministic:
        tf.config.experimental.enable_op_determinism()

    targets = ((labels + 1) // 2).astype(np.float32)
    model = build_network(arch)
    model.compile(
        optimizer=keras.optimizers.Adam(learning_rate=config.learning_rate),
        loss="binary_crossentropy",
        metrics=["accuracy"],
    )
    stopper = keras.callbacks.EarlyStopping(
        monitor="val_loss", patience=config.patience, restore_best_weights=True
    )
    history = model.fit(
        tokens[split.train],
        targets[split.train],
        validation_data=(tokens[split.validation], targets[split.validation]),
        epochs=config.max_epochs,
        batch_size=config.batch_size,
        callbacks=[stopper],
        verbose=0,
    )
    epochs_run = len(history.history["loss"])
    metrics = {
        "train_accuracy": _accuracy(model, tokens[split.train], labels[split.train], config.batch_size),
        "validation_accuracy": _accuracy(
            model, tokens[split.validation], labels[split.validation], config.batch_size
        ),
        "test_accuracy": _accuracy(model, tokens[split.test], labels[split.test], config.batch_size),
    }
    return TrainingResult(
        model=model,
        architecture=arch,
        config=config,
        epochs_run=epochs_run,
        metrics=metrics,
        history={k: [float(v) for v in vs] for k, vs in history.history.items()},
        split=split,
    )
