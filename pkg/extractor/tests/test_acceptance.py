"""Acceptance gate for the feature extractor.

One verdict line per criterion, same format as the consumer package's
gate: ACCEPTANCE <name>: PASS/FAIL (detail).
"""

import numpy as np

from extractor import (
    TrainingConfig,
    export_latent,
    synthetic_token_dataset,
    train_extractor,
)


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_extractor_overfit(tmp_path):
    ids, tokens, labels = synthetic_token_dataset(100, seed=0)
    config = TrainingConfig(max_epochs=40, patience=15, seed=0)
    result = train_extractor(tokens, labels, config=config)

    train_accuracy = result.metrics["train_accuracy"]
    path = tmp_path / "latent_features.csv"
    latent = export_latent(result.model, ids, tokens, labels, path)
    peak = float(np.abs(latent).max())

    from polyphoton.pipeline import ingest_features_csv

    ingested = ingest_features_csv(path)
    round_trip_ok = (
        len(ingested) == 100
        and ingested.feature_dim == result.architecture.latent_dim
        and np.array_equal(ingested.y.astype(int), labels)
    )

    _verdict(
        "extractor_overfit",
        train_accuracy >= 0.99 and peak <= 1.0 and round_trip_ok,
        f"train accuracy {train_accuracy:.3f} after {result.epochs_run} epochs, "
        f"max |latent| {peak:.6f}, ingest round trip "
        f"{'ok' if round_trip_ok else 'mismatch'}",
    )
