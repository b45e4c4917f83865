"""End-to-end orchestration: configs, metrics, CSV and JSON artifacts.

A run is fully described by one declarative config (TOML or JSON): where
features come from (a precomputed CSV or the synthetic generator), the
noise model, and the training knobs. The emitted report echoes the config
so an experiment is reproducible from its own artifact.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .circuits import default_ansatz
from .exceptions import (
    ConfigurationError,
    CsvFormatError,
    InvalidDatasetError,
    PipelineStageError,
    PolyphotonError,
)
from .features import FeatureSet, Standardizer, augment, stratified_split
from .fock import FockState
from .model import VqcModel, outcome_space_size, probability_matrix
from .simulate import NoiseModel
from .train import TrainConfig, TrainedResult, seesaw_train

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "accuracy",
    "ConfusionMatrix",
    "confusion",
    "ingest_features_csv",
    "write_features_csv",
    "synthetic_blobs",
    "RunConfig",
    "RunArtifacts",
    "run_experiment",
    "evaluate_model",
]

REPORT_SCHEMA_VERSION = 1


def accuracy(predictions, labels) -> float:
    """Fraction of matching entries.

    Raises:
        InvalidDatasetError: empty input or mismatched lengths.
    """
    pred = np.asarray(predictions, dtype=float)
    lab = np.asarray(labels, dtype=float)
    if pred.size == 0 or pred.shape != lab.shape:
        raise InvalidDatasetError(
            f"need equal non-empty vectors, got {pred.shape} and {lab.shape}"
        )
    return float(np.mean(pred == lab))


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts with +1 (VIS) as the positive class; errors are Poisson sqrt(count)."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total

    def to_dict(self) -> dict[str, Any]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "errors": {
                "tp": math.sqrt(self.tp),
                "fp": math.sqrt(self.fp),
                "fn": math.sqrt(self.fn),
                "tn": math.sqrt(self.tn),
            },
        }


def confusion(predictions, labels) -> ConfusionMatrix:
    """Counts per (true, predicted) cell.

    Raises:
        InvalidDatasetError: as accuracy.
    """
    pred = np.asarray(predictions, dtype=float)
    lab = np.asarray(labels, dtype=float)
    if pred.size == 0 or pred.shape != lab.shape:
        raise InvalidDatasetError(
            f"need equal non-empty vectors, got {pred.shape} and {lab.shape}"
        )
    return ConfusionMatrix(
        tp=int(np.sum((pred == 1) & (lab == 1))),
        fp=int(np.sum((pred == 1) & (lab == -1))),
        fn=int(np.sum((pred == -1) & (lab == 1))),
        tn=int(np.sum((pred == -1) & (lab == -1))),
    )


def _expect_header(actual: list[str], path, k: int) -> None:
    expected = ["id"] + [f"x{i + 1}" for i in range(k)] + ["label"]
    if actual != expected:
        raise CsvFormatError(
            f"{path}:1: header {actual} does not match expected {expected}"
        )


def ingest_features_csv(path) -> FeatureSet:
    """Read a feature CSV with header id,x1,...,xk,label (labels +1/-1).

    An empty body yields an empty FeatureSet and a warning.

    Raises:
        CsvFormatError: missing file, malformed header or row, non-finite
            value, or label outside {+1, -1}; messages carry line numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise CsvFormatError(f"feature CSV not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty, expected a header") from None
        if len(header) < 3:
            raise CsvFormatError(f"{path}:1: header must be id,x1,...,xk,label")
        k = len(header) - 2
        _expect_header(header, path, k)
        ids: list[str] = []
        rows: list[list[float]] = []
        labels: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != k + 2:
                raise CsvFormatError(
                    f"{path}:{lineno}: expected {k + 2} fields, got {len(row)}"
                )
            try:
                values = [float(v) for v in row[1 : k + 1]]
                label = float(row[-1])
            except ValueError as exc:
                raise CsvFormatError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise CsvFormatError(f"{path}:{lineno}: non-finite feature value")
            if label not in (-1.0, 1.0):
                raise CsvFormatError(
                    f"{path}:{lineno}: label must be +1 or -1, got {row[-1]}"
                )
            ids.append(row[0])
            rows.append(values)
            labels.append(label)
    if not rows:
        warnings.warn(f"{path} contains a header but no data rows", UserWarning, stacklevel=2)
        return FeatureSet(ids=(), x=np.zeros((0, k)), y=np.zeros(0))
    return FeatureSet(ids=tuple(ids), x=np.array(rows), y=np.array(labels))


def write_features_csv(path, features: FeatureSet) -> None:
    """Write the id,x1,...,xk,label schema that ingest_features_csv reads."""
    k = features.feature_dim
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"x{i + 1}" for i in range(k)] + ["label"])
        for i in range(len(features)):
            writer.writerow(
                [features.ids[i]]
                + [repr(float(v)) for v in features.x[i]]
                + [f"{int(features.y[i]):+d}"]
            )


def synthetic_blobs(
    n: int = 134,
    seed: int = 0,
    separation: float = 4.0,
    spread: float = 0.7,
) -> FeatureSet:
    """Two balanced 2-d Gaussian blobs on the diagonal, labels +1/-1.

    A hermetic stand-in for the polymer latent features: class centers sit
    ``separation`` apart along the (1,1) direction with isotropic standard
    deviation ``spread``.
    """
    if n < 2:
        raise ConfigurationError(f"need at least 2 samples, got {n}")
    rng = np.random.default_rng(seed)
    half = n // 2
    offset = separation / (2.0 * math.sqrt(2.0))
    pos = rng.normal(loc=(+offset, +offset), scale=spread, size=(n - half, 2))
    neg = rng.normal(loc=(-offset, -offset), scale=spread, size=(half, 2))
    x = np.vstack([pos, neg])
    y = np.concatenate([np.ones(n - half), -np.ones(half)])
    order = rng.permutation(n)
    return FeatureSet(
        ids=tuple(f"synth-{i:04d}" for i in range(n)), x=x[order], y=y[order]
    )


_FEATURE_MODES = ("synthetic", "precomputed_k2_augment", "precomputed_k4")


@dataclass(frozen=True)
class RunConfig:
    """Declarative description of one experiment."""

    feature_mode: str = "synthetic"
    features_csv: str | None = None
    output_dir: str = "runs"
    train: TrainConfig = field(default_factory=TrainConfig)
    noise: NoiseModel = field(default_factory=NoiseModel)
    detector: str = "pnr"
    mode_count: int = 5
    input_modes: tuple[int, ...] = (0, 2, 4)
    max_trainable_per_block: int | None = None
    test_fraction: float = 0.25
    synth_samples: int = 134
    synth_separation: float = 4.0
    synth_spread: float = 0.7
    raw_text: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.feature_mode not in _FEATURE_MODES:
            raise ConfigurationError(
                f"feature_mode must be one of {_FEATURE_MODES}, got {self.feature_mode!r}"
            )
        if self.feature_mode != "synthetic" and not self.features_csv:
            raise ConfigurationError(
                f"feature_mode {self.feature_mode!r} requires features_csv"
            )
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigurationError(
                f"test_fraction must be in (0, 1), got {self.test_fraction}"
            )
        object.__setattr__(self, "input_modes", tuple(self.input_modes))

    def validate(self) -> None:
        """Check referenced paths before any compute."""
        if self.features_csv is not None and not Path(self.features_csv).is_file():
            raise ConfigurationError(f"features_csv does not exist: {self.features_csv}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature_mode": self.feature_mode,
            "features_csv": self.features_csv,
            "output_dir": self.output_dir,
            "train": self.train.to_dict(),
            "noise": {
                "source_loss": self.noise.source_loss,
                "indistinguishability": self.noise.indistinguishability,
                "shot_convention": self.noise.shot_convention,
            },
            "detector": self.detector,
            "mode_count": self.mode_count,
            "input_modes": list(self.input_modes),
            "max_trainable_per_block": self.max_trainable_per_block,
            "test_fraction": self.test_fraction,
            "synth_samples": self.synth_samples,
            "synth_separation": self.synth_separation,
            "synth_spread": self.synth_spread,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any], raw_text: str | None = None) -> "RunConfig":
        doc = dict(doc)
        known = {f for f in cls.__dataclass_fields__ if f != "raw_text"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "train" in doc and isinstance(doc["train"], dict):
            doc["train"] = TrainConfig.from_dict(doc["train"])
        if "noise" in doc and isinstance(doc["noise"], dict):
            try:
                doc["noise"] = NoiseModel(**doc["noise"])
            except TypeError as exc:
                raise ConfigurationError(f"bad noise section: {exc}") from exc
        return cls(**doc, raw_text=raw_text)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        """Load TOML (.toml) or JSON (anything else) into a validated config."""
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"config file not found: {path}")
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            try:
                doc = tomllib.loads(text)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigurationError(f"{path}: invalid TOML: {exc}") from exc
        else:
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(doc, raw_text=text)


@dataclass(frozen=True)
class RunArtifacts:
    report: dict[str, Any]
    result: TrainedResult
    model: VqcModel
    report_path: Path
    model_path: Path
    eval_features_path: Path


def _stage(name: str):
    # Tag errors with the pipeline stage they came from.
    class _StageGuard:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, (PolyphotonError, OSError)):
                if isinstance(exc, PipelineStageError):
                    return False
                raise PipelineStageError(name, str(exc)) from exc
            return False

    return _StageGuard()


def _build_template(config: RunConfig, feature_dim: int) -> VqcModel:
    spec = default_ansatz(
        config.mode_count,
        feature_dim,
        max_trainable_per_block=config.max_trainable_per_block,
    )
    occupations = [0] * config.mode_count
    for mode in config.input_modes:
        if not 0 <= mode < config.mode_count:
            raise ConfigurationError(f"input mode {mode} out of range")
        if occupations[mode]:
            raise ConfigurationError(f"duplicate input mode {mode}")
        occupations[mode] = 1
    n_outcomes = outcome_space_size(
        sum(occupations), config.mode_count, config.detector
    )
    return VqcModel(
        spec=spec,
        theta1=np.zeros(spec.trainable_counts[0]),
        theta2=np.zeros(spec.trainable_counts[1]),
        lam=np.zeros(n_outcomes),
        input_state=FockState(tuple(occupations)),
        noise=config.noise,
        detector=config.detector,
    )


def run_experiment(config: RunConfig) -> RunArtifacts:
    """Features -> split -> standardize -> (augment) -> train -> report.

    Writes report.json and model.json into the output directory; on error
    any partially written outputs are removed and the failure is re-raised
    tagged with its pipeline stage.
    """
    started_at = time.time()
    with _stage("validate"):
        config.validate()

    with _stage("features"):
        if config.feature_mode == "synthetic":
            features = synthetic_blobs(
                n=config.synth_samples,
                seed=config.train.seed,
                separation=config.synth_separation,
                spread=config.synth_spread,
            )
        else:
            features = ingest_features_csv(config.features_csv)
        expected_k = 4 if config.feature_mode == "precomputed_k4" else 2
        if features.feature_dim != expected_k:
            raise InvalidDatasetError(
                f"{config.feature_mode} expects {expected_k}-dim features, got "
                f"{features.feature_dim}"
            )

    with _stage("split"):
        split = stratified_split(features, config.test_fraction, seed=config.train.seed)

    with _stage("standardize"):
        scaler = Standardizer().fit(split.train.x)
        train_x = scaler.transform(split.train.x)
        test_x = scaler.transform(split.test.x)

    with _stage("augment"):
        if config.feature_mode in ("synthetic", "precomputed_k2_augment"):
            train_x = augment(train_x)
            test_x = augment(test_x)

    with _stage("train"):
        template = _build_template(config, train_x.shape[1])
        result = seesaw_train(
            template, train_x, split.train.y, test_x, split.test.y, config.train
        )
        model = result.best_model(template)

    finished_at = time.time()
    report = _build_report(config, split.train.y, split.test.y, result, started_at, finished_at)

    with _stage("report"):
        out_dir = Path(config.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / "report.json"
        model_path = out_dir / "model.json"
        features_path = out_dir / "eval_features.csv"
        # The held-out set in model input space, so `eval` on (model.json,
        # eval_features.csv) reproduces the best repeat's test metrics.
        eval_features = FeatureSet(ids=split.test.ids, x=test_x, y=split.test.y)
        written: list[Path] = []
        try:
            for path, doc in ((report_path, report), (model_path, model.to_dict())):
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(doc, fh, indent=2, sort_keys=True)
                    fh.write("\n")
                written.append(path)
            write_features_csv(features_path, eval_features)
            written.append(features_path)
        except OSError:
            for path in written:
                path.unlink(missing_ok=True)
            raise

    return RunArtifacts(
        report=report,
        result=result,
        model=model,
        report_path=report_path,
        model_path=model_path,
        eval_features_path=features_path,
    )


def _build_report(
    config: RunConfig,
    train_y: np.ndarray,
    test_y: np.ndarray,
    result: TrainedResult,
    started_at: float,
    finished_at: float,
) -> dict[str, Any]:
    per_repeat = []
    for rep in result.repeats:
        train_conf = confusion(rep.train_predictions, train_y)
        test_conf = confusion(rep.test_predictions, test_y)
        per_repeat.append(
            {
                "train_accuracy": rep.train_accuracy,
                "test_accuracy": rep.test_accuracy,
                "best_loss": rep.best_loss,
                "loss_trace": rep.loss_trace.tolist(),
                "best_loss_trace": rep.best_loss_trace.tolist(),
                "confusion_train": train_conf.to_dict(),
                "confusion_test": test_conf.to_dict(),
            }
        )
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": config.to_dict(),
        "config_raw": config.raw_text,
        "dataset": {
            "train_size": int(train_y.size),
            "test_size": int(test_y.size),
            "train_class_counts": {
                "-1": int(np.sum(train_y == -1)),
                "+1": int(np.sum(train_y == 1)),
            },
            "test_class_counts": {
                "-1": int(np.sum(test_y == -1)),
                "+1": int(np.sum(test_y == 1)),
            },
        },
        "repeats": per_repeat,
        "best_repeat": result.best_repeat,
        "metrics": {
            "mean_train_accuracy": result.mean_train_accuracy,
            "std_train_accuracy": result.std_train_accuracy,
            "mean_test_accuracy": result.mean_test_accuracy,
            "std_test_accuracy": result.std_test_accuracy,
        },
        "seeds": {"master": config.train.seed},
        "meta": {
            "started_at": started_at,
            "finished_at": finished_at,
            "wall_seconds": result.wall_seconds,
        },
    }


def evaluate_model(model: VqcModel, features: FeatureSet) -> dict[str, Any]:
    """Exact-probability metrics of a trained model on a feature set."""
    if len(features) == 0:
        raise InvalidDatasetError("cannot evaluate on an empty feature set")
    p = probability_matrix(model, features.x)
    predictions = np.where(p @ model.lam >= 0.0, 1.0, -1.0)
    conf = confusion(predictions, features.y)
    return {
        "accuracy": accuracy(predictions, features.y),
        "confusion": conf.to_dict(),
        "n_samples": len(features),
    }
