"""Command-line interface: train (fit on an encoded CSV, write weights +
log), export (apply saved weights, write a features CSV), synth (emit a
synthetic token corpus). Exit codes: 0 success, 2 invalid input, 1
runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .artifacts import (
    export_latent,
    load_model,
    read_encoded_csv,
    save_model,
    write_encoded_csv,
    write_training_log,
)
from .exceptions import ExtractorError
from .network import ArchitectureConfig
from .training import TrainingConfig, synthetic_token_dataset, train_extractor


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyphoton-extract",
        description="Train a recurrent feature extractor on encoded token CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit the network on an encoded CSV")
    p_train.add_argument("encoded", help="CSV with header id,t0,...,label")
    p_train.add_argument("--out", default=".", help="directory for weights.npz and training_log.json")
    p_train.add_argument("--latent-dim", type=int, default=2, choices=[2, 4])
    p_train.add_argument("--hidden", type=int, nargs=2, default=[32, 16], metavar=("H1", "H2"))
    p_train.add_argument("--learning-rate", type=float, default=0.001)
    p_train.add_argument("--max-epochs", type=int, default=100)
    p_train.add_argument("--patience", type=int, default=15)
    p_train.add_argument("--batch-size", type=int, default=32)
    p_train.add_argument("--seed", type=int, default=0)

    p_export = sub.add_parser("export", help="write latent features for an encoded CSV")
    p_export.add_argument("--weights", required=True, help="npz container written by train")
    p_export.add_argument("--encoded", required=True, help="CSV with header id,t0,...,label")
    p_export.add_argument("--out", required=True, help="features CSV path")

    p_synth = sub.add_parser("synth", help="emit a synthetic encoded-token CSV")
    p_synth.add_argument("--samples", type=int, default=100)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", default="synthetic_tokens.csv", help="output CSV path")

    return parser


def _cmd_train(args) -> int:
    ids, tokens, labels = read_encoded_csv(args.encoded)
    arch = ArchitectureConfig(
        sequence_length=tokens.shape[1] if tokens.size else ArchitectureConfig.sequence_length,
        latent_dim=args.latent_dim,
        hidden_units=tuple(args.hidden),
    )
    config = TrainingConfig(
        learning_rate=args.learning_rate,
        max_epochs=args.max_epochs,
        patience=args.patience,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    result = train_extractor(tokens, labels, arch, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    weights_path = out_dir / "weights.npz"
    log_path = out_dir / "training_log.json"
    save_model(result, None, weights_path)
    write_training_log(log_path, result, notes={"encoded_csv": str(args.encoded)})
    print(
        f"trained {result.epochs_run} epochs, "
        f"train accuracy {result.metrics['train_accuracy']:.3f}, "
        f"test accuracy {result.metrics['test_accuracy']:.3f}"
    )
    print(f"weights: {weights_path}")
    print(f"log:     {log_path}")
    return 0


def _cmd_export(args) -> int:
    model, _arch = load_model(args.weights)
    ids, tokens, labels = read_encoded_csv(args.encoded)
    latent = export_latent(model, ids, tokens, labels, args.out)
    print(f"wrote {latent.shape[0]} rows, k={latent.shape[1]} -> {args.out}")
    return 0


def _cmd_synth(args) -> int:
    ids, tokens, labels = synthetic_token_dataset(args.samples, seed=args.seed)
    write_encoded_csv(args.out, ids, tokens, labels)
    positive = int((labels == 1).sum())
    print(f"wrote {len(ids)} rows ({positive} positive, {len(ids) - positive} negative) -> {args.out}")
    return 0


_COMMANDS = {"train": _cmd_train, "export": _cmd_export, "synth": _cmd_synth}


def cli(argv=None) -> int:
    """Parse and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1
    except json.JSONDecodeError as exc:
        # malformed input document: a validation problem, not a crash
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(cli())


if __name__ == "__main__":
    main()
