"""File formats shared with the downstream pipeline.

Two CSV schemas cross the package boundary: encoded token rows come in as
`id,t0,...,t{L-1},label` and extracted features leave as
`id,x1,...,xk,label`, labels -1/+1 in both. The weight container is a
plain npz holding one array per weight path plus a JSON manifest, so any
consumer with numpy can open it.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .exceptions import DataError, ExportError
from .network import ArchitectureConfig, build_network, truncate_to_latent
from .training import TrainingResult

_MANIFEST_KEY = "__manifest__"
_SCHEMA_VERSION = 1


def read_encoded_csv(path) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Read token rows with header id,t0,...,t{L-1},label.

    The sequence length is taken from the header, so files of any width
    parse; width checks against a model happen at training time.

    Raises:
        DataError: missing file or structural problems, with line numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"encoded CSV not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty, expected a header") from None
        if len(header) < 3 or header[0] != "id" or header[-1] != "label":
            raise DataError(f"{path}:1: header must be id,t0,...,label")
        length = len(header) - 2
        expected = ["id"] + [f"t{i}" for i in range(length)] + ["label"]
        if header != expected:
            raise DataError(f"{path}:1: header must be id,t0,...,t{length - 1},label")
        ids: list[str] = []
        rows: list[list[int]] = []
        labels: list[int] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != length + 2:
                raise DataError(f"{path}:{lineno}: expected {length + 2} fields, got {len(row)}")
            try:
                values = [int(v) for v in row[1:-1]]
                label = int(row[-1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: tokens and label must be integers") from None
            if any(v < 0 for v in values):
                raise DataError(f"{path}:{lineno}: token values must be non-negative")
            if label not in (-1, 1):
                raise DataError(f"{path}:{lineno}: label must be +1 or -1, got {label}")
            ids.append(row[0])
            rows.append(values)
            labels.append(label)
    tokens = np.asarray(rows, dtype=np.int64).reshape(len(rows), length)
    return tuple(ids), tokens, np.asarray(labels, dtype=np.int64)


def write_encoded_csv(path, ids: Sequence[str], tokens: np.ndarray, labels: Sequence[int]) -> None:
    """Write token rows in the schema read_encoded_csv expects."""
    tokens = np.asarray(tokens)
    if tokens.ndim != 2:
        raise DataError(f"token matrix must be 2-d, got shape {tokens.shape}")
    if not (len(ids) == tokens.shape[0] == len(labels)):
        raise DataError("ids, tokens, and labels must have equal length")
    length = tokens.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"t{i}" for i in range(length)] + ["label"])
        for i in range(tokens.shape[0]):
            writer.writerow([ids[i]] + [int(t) for t in tokens[i]] + [f"{int(labels[i]):+d}"])


def write_features_csv(path, ids: Sequence[str], features: np.ndarray, labels: Sequence[int]) -> None:
    """Write extracted features with header id,x1,...,xk,label."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise DataError(f"feature matrix must be 2-d, got shape {features.shape}")
    if not (len(ids) == features.shape[0] == len(labels)):
        raise DataError("ids, features, and labels must have equal length")
    k = features.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"x{i + 1}" for i in range(k)] + ["label"])
        for i in range(features.shape[0]):
            writer.writerow(
                [ids[i]]
                + [repr(float(v)) for v in features[i]]
                + [f"{int(labels[i]):+d}"]
            )


def save_model(result_or_model, arch: ArchitectureConfig | None, path) -> None:
    """Write weights plus an architecture manifest into one npz file.

    Accepts either a TrainingResult (architecture taken from it) or a bare
    model with an explicit ArchitectureConfig.
    """
    if isinstance(result_or_model, TrainingResult):
        model = result_or_model.model
        arch = result_or_model.architecture
    else:
        model = result_or_model
        if arch is None:
            raise ExportError("saving a bare model requires its ArchitectureConfig")
    arrays = {w.path: w.numpy() for w in model.weights}
    manifest = {
        "schema_version": _SCHEMA_VERSION,
        "architecture": arch.to_dict(),
        "weights": [
            {"path": w.path, "shape": list(w.shape), "dtype": str(w.dtype)}
            for w in model.weights
        ],
    }
    np.savez(path, **{_MANIFEST_KEY: np.array(json.dumps(manifest)), **arrays})


def load_model(path):
    """Rebuild the network from a saved container.

    Returns (model, architecture).

    Raises:
        DataError: missing file, unreadable container, or weights that do
            not match the architecture in the manifest.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"weight file not found: {path}")
    try:
        container = np.load(path, allow_pickle=False)
    except (ValueError, OSError) as exc:
        raise DataError(f"{path}: not a readable weight container: {exc}") from exc
    if _MANIFEST_KEY not in container.files:
        raise DataError(f"{path}: missing manifest entry")
    try:
        manifest = json.loads(str(container[_MANIFEST_KEY]))
        arch = ArchitectureConfig.from_dict(manifest["architecture"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed manifest: {exc}") from exc
    model = build_network(arch)
    stored = set(container.files) - {_MANIFEST_KEY}
    needed = {w.path for w in model.weights}
    if stored != needed:
        raise DataError(
            f"{path}: weight entries do not match the architecture "
            f"(missing {sorted(needed - stored)}, extra {sorted(stored - needed)})"
        )
    for w in model.weights:
        saved = container[w.path]
        if tuple(saved.shape) != tuple(w.shape):
            raise DataError(
                f"{path}: weight {w.path} has shape {saved.shape}, expected {tuple(w.shape)}"
            )
        w.assign(saved)
    return model, arch


def write_training_log(path, result: TrainingResult, notes: dict[str, Any] | None = None) -> None:
    """Dump the run summary as JSON.

    Settings the architecture leaves open (hidden widths, batch size,
    dropout position, weight restoration) are echoed under
    `chosen_defaults` so the log documents them explicitly.
    """
    doc = {
        "schema_version": _SCHEMA_VERSION,
        "architecture": result.architecture.to_dict(),
        "training": result.config.to_dict(),
        "chosen_defaults": {
            "hidden_units": list(result.architecture.hidden_units),
            "batch_size": result.config.batch_size,
            "dropout_position": "after the recurrent layer",
            "early_stopping_restores_best_weights": True,
        },
        "epochs_run": result.epochs_run,
        "metrics": result.metrics,
        "history": result.history,
    }
    if notes:
        doc["notes"] = notes
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def export_latent(model, ids: Sequence[str], tokens: np.ndarray, labels, path, batch_size: int = 256) -> np.ndarray:
    """Run the truncated network and write features CSV rows.

    Returns the latent matrix. Every component passes through tanh, so
    values lie in [-1, 1]; the bound is enforced before writing.

    Raises:
        ExportError: model without a bottleneck, token width mismatch, or
            out-of-range outputs.
    """
    tokens = np.asarray(tokens, dtype=np.int64)
    extractor = truncate_to_latent(model)
    expected = extractor.input.shape[1]
    if tokens.ndim != 2 or tokens.shape[1] != expected:
        raise ExportError(f"token matrix must be (N, {expected}), got {tokens.shape}")
    if not (len(ids) == tokens.shape[0] == len(labels)):
        raise ExportError("ids, tokens, and labels must have equal length")
    latent = extractor.predict(tokens, batch_size=batch_size, verbose=0)
    if not np.all(np.isfinite(latent)) or np.abs(latent).max(initial=0.0) > 1.0:
        raise ExportError("latent outputs left [-1, 1]; model is not a tanh bottleneck")
    write_features_csv(path, ids, latent, labels)
    return latent
