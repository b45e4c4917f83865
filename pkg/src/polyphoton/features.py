"""Polymer featurization: SMILES tokenization, gap labeling, cleaning,
standardization, augmentation, and reproducible dataset splits.

Raw records are (smiles, gap) pairs; the optical gap in eV determines the
binary class (NIR -> -1, VIS -> +1, MIR dropped). Feature vectors are the
low-dimensional latent representations produced elsewhere; this module
treats them as opaque k-dimensional reals.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from math import ceil
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import (
    CsvFormatError,
    GapRangeError,
    InvalidDatasetError,
    InvalidDimensionError,
    OverlongSmilesError,
    SplitError,
    UnknownTokenError,
)

__all__ = [
    "ENCODED_LENGTH",
    "TokenDictionary",
    "build_dictionary",
    "bundled_dictionary",
    "encode_smiles",
    "GapLabel",
    "label_gap",
    "PreprocessReport",
    "preprocess_dataset",
    "Standardizer",
    "augment",
    "FeatureSet",
    "DatasetSplit",
    "stratified_split",
    "balanced_subsample",
    "read_smiles_csv",
    "write_encoded_csv",
    "read_encoded_csv",
]

ENCODED_LENGTH = 139

# Gap-class boundaries in eV; intervals are right-closed.
_GAP_MIN = 0.025
_MIR_MAX = 0.4
_NIR_MAX = 1.6
_GAP_MAX = 4.0

_Z_CUTOFF = 3.0


@dataclass(frozen=True)
class TokenDictionary:
    """Character -> index map in sorted character order, indices 0..N-1."""

    token_to_index: dict[str, int]
    inferred_tokens: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        items = sorted(self.token_to_index.items(), key=lambda kv: kv[1])
        indices = [i for _, i in items]
        if indices != list(range(len(items))):
            raise InvalidDatasetError(f"token indices must be 0..{len(items) - 1} with no gaps")
        tokens = [t for t, _ in items]
        if any(len(t) != 1 for t in tokens):
            raise InvalidDatasetError("tokens must be single characters")
        if tokens != sorted(tokens):
            raise InvalidDatasetError("token order must equal sorted character order")

    def __len__(self) -> int:
        return len(self.token_to_index)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    def index(self, token: str) -> int:
        try:
            return self.token_to_index[token]
        except KeyError:
            raise UnknownTokenError(f"character {token!r} is not in the dictionary") from None

    def to_dict(self) -> dict[str, Any]:
        return {
            "token_to_index": dict(self.token_to_index),
            "inferred_tokens": list(self.inferred_tokens),
        }


def build_dictionary(corpus: Sequence[str]) -> TokenDictionary:
    """Sorted unique characters of the corpus mapped to 0-based indices.

    Raises:
        InvalidDatasetError: the corpus is empty.
    """
    if len(corpus) == 0:
        raise InvalidDatasetError("cannot build a dictionary from an empty corpus")
    chars = sorted({c for s in corpus for c in s})
    return TokenDictionary(token_to_index={c: i for i, c in enumerate(chars)})


def bundled_dictionary() -> TokenDictionary:
    """The shipped 34-character dictionary for the polymer corpus.

    Note '#' maps to 0, which is also the padding value; the collision is
    inherent to this encoding and kept for compatibility.
    """
    doc = json.loads(
        resources.files("polyphoton").joinpath("data/smiles_dictionary.json").read_text()
    )
    return TokenDictionary(
        token_to_index=doc["token_to_index"],
        inferred_tokens=tuple(doc["inferred_tokens"]),
    )


def encode_smiles(
    s: str, dictionary: TokenDictionary, length: int = ENCODED_LENGTH
) -> np.ndarray:
    """Character-wise index lookup, zero-padded to ``length``.

    Raises:
        OverlongSmilesError: the string exceeds the storage length.
        UnknownTokenError: a character is missing from the dictionary.
    """
    if len(s) > length:
        raise OverlongSmilesError(
            f"SMILES of length {len(s)} exceeds the {length}-character bound"
        )
    encoded = np.zeros(length, dtype=np.int64)
    for i, c in enumerate(s):
        encoded[i] = dictionary.index(c)
    return encoded


@dataclass(frozen=True)
class GapLabel:
    """Optical-gap class; MIR carries no numeric label and is dropped upstream."""

    class_name: str
    numeric: int | None


def label_gap(gap: float) -> GapLabel:
    """Class of an optical gap in eV: MIR [0.025, 0.4], NIR (0.4, 1.6], VIS (1.6, 4.0].

    Raises:
        GapRangeError: gap outside [0.025, 4.0] or not finite.
    """
    if not np.isfinite(gap) or not _GAP_MIN <= gap <= _GAP_MAX:
        raise GapRangeError(f"gap {gap} eV outside the physical range [{_GAP_MIN}, {_GAP_MAX}]")
    if gap <= _MIR_MAX:
        return GapLabel(class_name="MIR", numeric=None)
    if gap <= _NIR_MAX:
        return GapLabel(class_name="NIR", numeric=-1)
    return GapLabel(class_name="VIS", numeric=+1)


@dataclass(frozen=True)
class PreprocessReport:
    input_count: int
    kept_count: int
    dropped_overlong: int
    dropped_bad_gap: int
    dropped_mir: int
    dropped_duplicate: int
    dropped_outlier: int
    outlier_passes: int
    kept_indices: tuple[int, ...]

    @property
    def empty_result(self) -> bool:
        return self.kept_count == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_count": self.input_count,
            "kept_count": self.kept_count,
            "dropped_overlong": self.dropped_overlong,
            "dropped_bad_gap": self.dropped_bad_gap,
            "dropped_mir": self.dropped_mir,
            "dropped_duplicate": self.dropped_duplicate,
            "dropped_outlier": self.dropped_outlier,
            "outlier_passes": self.outlier_passes,
            "empty_result": self.empty_result,
        }


def preprocess_dataset(
    records: Sequence[tuple[str, float]],
) -> tuple[list[tuple[str, float]], PreprocessReport]:
    """Clean raw (smiles, gap) records.

    Drops, in order: SMILES longer than 139 characters; gaps outside the
    labelable range; MIR-class records; duplicate SMILES (first occurrence
    kept); gap outliers with |z| > 3, re-trimming until stable so the whole
    operation is idempotent. Zero gap variance disables outlier trimming.

    Returns the kept records plus a report with drop counts and the kept
    input indices. An empty result is allowed and flagged in the report.
    """
    overlong = bad_gap = mir = duplicate = 0
    seen: set[str] = set()
    kept: list[int] = []
    for i, (smiles, gap) in enumerate(records):
        if len(smiles) > ENCODED_LENGTH:
            overlong += 1
            continue
        try:
            lab = label_gap(float(gap))
        except GapRangeError:
            bad_gap += 1
            continue
        if lab.class_name == "MIR":
            mir += 1
            continue
        if smiles in seen:
            duplicate += 1
            continue
        seen.add(smiles)
        kept.append(i)

    outlier = 0
    passes = 0
    while len(kept) > 0:
        passes += 1
        gaps = np.array([float(records[i][1]) for i in kept])
        std = gaps.std()
        if std == 0.0:
            break
        z = np.abs(gaps - gaps.mean()) / std
        survivors = [i for i, zi in zip(kept, z) if zi <= _Z_CUTOFF]
        dropped = len(kept) - len(survivors)
        outlier += dropped
        kept = survivors
        if dropped == 0:
            break

    cleaned = [(records[i][0], float(records[i][1])) for i in kept]
    report = PreprocessReport(
        input_count=len(records),
        kept_count=len(kept),
        dropped_overlong=overlong,
        dropped_bad_gap=bad_gap,
        dropped_mir=mir,
        dropped_duplicate=duplicate,
        dropped_outlier=outlier,
        outlier_passes=passes,
        kept_indices=tuple(kept),
    )
    return cleaned, report


class Standardizer(TransformerMixin, BaseEstimator):
    """Per-dimension (x - mean)/std with statistics from the fit subset.

    Dimensions with zero variance pass through unchanged; they are listed
    in ``constant_dims_`` and a warning is emitted at fit time.
    """

    def fit(self, X, y=None):
        X = check_array(X)
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.constant_dims_ = std == 0.0
        if self.constant_dims_.any():
            warnings.warn(
                f"dimensions {np.flatnonzero(self.constant_dims_).tolist()} are "
                "constant and pass through unstandardized",
                UserWarning,
                stacklevel=2,
            )
        self.mean_ = np.where(self.constant_dims_, 0.0, mean)
        self.scale_ = np.where(self.constant_dims_, 1.0, std)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidDimensionError(
                f"got {X.shape[1]} features, fitted with {self.n_features_in_}"
            )
        return (X - self.mean_) / self.scale_


def augment(v: np.ndarray) -> np.ndarray:
    """(x1, x2) -> (x1, x2, x1^2, x2^2), also applied row-wise to batches.

    Raises:
        InvalidDimensionError: input feature dimension is not 2.
    """
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1] != 2:
        raise InvalidDimensionError(f"augment needs 2 features, got shape {arr.shape}")
    return np.concatenate([arr, arr**2], axis=-1)


@dataclass(frozen=True)
class FeatureSet:
    """Labeled feature vectors with stable source ids."""

    ids: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2:
            raise InvalidDatasetError(f"features must be 2-d, got shape {x.shape}")
        if y.shape != (x.shape[0],) or len(self.ids) != x.shape[0]:
            raise InvalidDatasetError(
                f"inconsistent sizes: {len(self.ids)} ids, {x.shape[0]} vectors, "
                f"{y.shape[0] if y.ndim == 1 else '?'} labels"
            )
        if x.size > 0 and not np.isfinite(x).all():
            raise InvalidDatasetError("feature values must be finite")
        if not set(np.unique(y).tolist()) <= {-1.0, 1.0}:
            raise InvalidDatasetError("labels must be +1 or -1")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.x.shape[1]

    def class_counts(self) -> dict[int, int]:
        return {
            -1: int(np.sum(self.y == -1.0)),
            +1: int(np.sum(self.y == +1.0)),
        }

    def subset(self, indices: Iterable[int]) -> "FeatureSet":
        idx = list(indices)
        return FeatureSet(
            ids=tuple(self.ids[i] for i in idx), x=self.x[idx], y=self.y[idx]
        )


@dataclass(frozen=True)
class DatasetSplit:
    train: FeatureSet
    test: FeatureSet
    seed: int
    test_fraction: float


def stratified_split(
    features: FeatureSet, test_fraction: float = 0.25, seed: int = 0
) -> DatasetSplit:
    """Seeded, class-stratified split.

    The test set holds ceil(N * test_fraction) samples, allocated across
    classes by largest remainder so per-class proportions stay within one
    sample of the global ratio.

    Raises:
        SplitError: a class has fewer than 2 samples, or the fraction is
            outside (0, 1).
    """
    if not 0.0 < test_fraction < 1.0:
        raise SplitError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(features)
    counts = features.class_counts()
    for label, count in counts.items():
        if count < 2:
            raise SplitError(f"class {label:+d} has {count} samples; need at least 2")
    n_test = ceil(n * test_fraction)

    quotas = {label: counts[label] * n_test / n for label in counts}
    base = {label: int(quotas[label]) for label in counts}
    leftover = n_test - sum(base.values())
    by_remainder = sorted(
        counts, key=lambda label: (quotas[label] - base[label], counts[label]), reverse=True
    )
    for label in by_remainder[:leftover]:
        base[label] += 1

    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in sorted(counts):
        members = np.flatnonzero(features.y == label)
        order = rng.permutation(len(members))
        shuffled = members[order]
        test_idx.extend(shuffled[: base[label]].tolist())
        train_idx.extend(shuffled[base[label] :].tolist())
    train_idx = [int(i) for i in rng.permutation(train_idx)]
    test_idx = [int(i) for i in rng.permutation(test_idx)]
    return DatasetSplit(
        train=features.subset(train_idx),
        test=features.subset(test_idx),
        seed=seed,
        test_fraction=test_fraction,
    )


def read_smiles_csv(path) -> list[tuple[str, str, float]]:
    """Read raw polymer records from a CSV with header id,smiles,gap_ev.

    Returns (id, smiles, gap) tuples; cleaning is a separate step.

    Raises:
        CsvFormatError: missing file, wrong header, wrong field count, or
            a non-numeric gap; messages carry line numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise CsvFormatError(f"SMILES CSV not found: {path}")
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty, expected a header") from None
        if header != ["id", "smiles", "gap_ev"]:
            raise CsvFormatError(
                f"{path}:1: header {header} does not match ['id', 'smiles', 'gap_ev']"
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise CsvFormatError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                gap = float(row[2])
            except ValueError:
                raise CsvFormatError(
                    f"{path}:{lineno}: gap_ev {row[2]!r} is not a number"
                ) from None
            records.append((row[0], row[1], gap))
    return records


def write_encoded_csv(path, ids: Sequence[str], tokens: np.ndarray, labels: Sequence[int]) -> None:
    """Write encoded SMILES rows with header id,t0,...,t138,label."""
    tokens = np.asarray(tokens)
    if tokens.ndim != 2 or tokens.shape[1] != ENCODED_LENGTH:
        raise InvalidDimensionError(
            f"token matrix must be (N, {ENCODED_LENGTH}), got {tokens.shape}"
        )
    if not (len(ids) == tokens.shape[0] == len(labels)):
        raise InvalidDatasetError("ids, tokens, and labels must have equal length")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"t{i}" for i in range(ENCODED_LENGTH)] + ["label"])
        for i in range(tokens.shape[0]):
            writer.writerow(
                [ids[i]] + [int(t) for t in tokens[i]] + [f"{int(labels[i]):+d}"]
            )


def read_encoded_csv(path) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Read an encoded-SMILES CSV back into (ids, token matrix, labels).

    Raises:
        CsvFormatError: structural problems, with line numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise CsvFormatError(f"encoded CSV not found: {path}")
    expected_header = ["id"] + [f"t{i}" for i in range(ENCODED_LENGTH)] + ["label"]
    ids: list[str] = []
    rows: list[list[int]] = []
    labels: list[int] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty, expected a header") from None
        if header != expected_header:
            raise CsvFormatError(f"{path}:1: header does not match id,t0..t138,label")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != ENCODED_LENGTH + 2:
                raise CsvFormatError(
                    f"{path}:{lineno}: expected {ENCODED_LENGTH + 2} fields, got {len(row)}"
                )
            try:
                toks = [int(v) for v in row[1 : ENCODED_LENGTH + 1]]
                label = int(row[-1])
            except ValueError as exc:
                raise CsvFormatError(f"{path}:{lineno}: {exc}") from None
            if label not in (-1, 1):
                raise CsvFormatError(f"{path}:{lineno}: label must be +1 or -1")
            ids.append(row[0])
            rows.append(toks)
            labels.append(label)
    tokens = np.array(rows, dtype=np.int64) if rows else np.zeros((0, ENCODED_LENGTH), dtype=np.int64)
    return tuple(ids), tokens, np.array(labels, dtype=np.int64)


def balanced_subsample(features: FeatureSet, size: int, seed: int = 0) -> FeatureSet:
    """Seeded subset with per-class counts differing by at most one.

    An odd ``size`` gives the extra sample to the larger class (ties to
    +1). Both classes must be present and large enough to fill their
    quota; in particular size = 1 cannot be balanced.

    Raises:
        SplitError: unbalanceable request or class shortage.
    """
    n = len(features)
    if not 1 <= size <= n:
        raise SplitError(f"size must be in [1, {n}], got {size}")
    counts = features.class_counts()
    if min(counts.values()) == 0:
        raise SplitError("both classes must be present to balance")
    targets = {label: size // 2 for label in counts}
    if size % 2 == 1:
        bigger = +1 if counts[+1] >= counts[-1] else -1
        targets[bigger] += 1
    for label, want in targets.items():
        if want < 1:
            raise SplitError(f"cannot balance a subsample of size {size} over two classes")
        if want > counts[label]:
            raise SplitError(
                f"class {label:+d} has {counts[label]} samples, need {want}"
            )
    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    for label in sorted(targets):
        members = np.flatnonzero(features.y == label)
        order = rng.permutation(len(members))
        chosen.extend(members[order][: targets[label]].tolist())
    chosen = [int(i) for i in rng.permutation(chosen)]
    return features.subset(chosen)
