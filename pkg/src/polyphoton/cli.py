"""Command-line entry point.

Subcommands: featurize (raw SMILES CSV to encoded CSV), train (config to
report), eval (trained model on a feature CSV), simulate (circuit JSON to
distribution JSON), synth (emit a synthetic blob dataset). Exit codes:
0 success, 2 validation problem, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .circuits import CircuitSpec, build_unitary
from .exceptions import ConfigurationError, PolyphotonError
from .features import (
    ENCODED_LENGTH,
    build_dictionary,
    encode_smiles,
    label_gap,
    bundled_dictionary,
    preprocess_dataset,
    read_smiles_csv,
    write_encoded_csv,
)
from .fock import FockState, enumerate_basis
from .model import VqcModel
from .pipeline import (
    RunConfig,
    evaluate_model,
    ingest_features_csv,
    run_experiment,
    synthetic_blobs,
    write_features_csv,
)
from .simulate import (
    NoiseModel,
    classical_distribution,
    ideal_distribution,
    noisy_distribution,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyphoton",
        description="Photonic variational classifier for polymer optical-gap classes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_feat = sub.add_parser("featurize", help="encode a raw SMILES CSV")
    p_feat.add_argument("input", help="CSV with header id,smiles,gap_ev")
    p_feat.add_argument("--out", default=".", help="output directory")
    p_feat.add_argument(
        "--dictionary",
        choices=["bundled", "corpus"],
        default="bundled",
        help="use the shipped 34-token dictionary or build one from the corpus",
    )

    p_train = sub.add_parser("train", help="run a training experiment from a config")
    p_train.add_argument("--config", required=True, help="TOML or JSON run config")
    p_train.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_train.add_argument("--out", default=None, help="override the output directory")
    p_train.add_argument(
        "--backend", choices=["exact", "shots"], default=None, help="override the backend"
    )

    p_eval = sub.add_parser("eval", help="evaluate a trained model on a feature CSV")
    p_eval.add_argument("--model", required=True, help="model JSON written by train")
    p_eval.add_argument("--features", required=True, help="CSV with header id,x1..xk,label")
    p_eval.add_argument("--out", default=None, help="write metrics JSON here instead of stdout")

    p_sim = sub.add_parser("simulate", help="compute an output distribution")
    p_sim.add_argument("circuit", help="circuit-run JSON document")
    p_sim.add_argument("--out", default=None, help="write distribution JSON here instead of stdout")

    p_synth = sub.add_parser("synth", help="emit a synthetic blob feature CSV")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument(
        "--out",
        default=".",
        help="output CSV path, or a directory to receive synthetic_features.csv",
    )
    p_synth.add_argument("--samples", type=int, default=134)
    p_synth.add_argument("--separation", type=float, default=4.0)
    p_synth.add_argument("--spread", type=float, default=0.7)

    return parser


def _cmd_featurize(args) -> int:
    records = read_smiles_csv(args.input)
    cleaned, report = preprocess_dataset([(s, g) for _, s, g in records])
    ids = [records[i][0] for i in report.kept_indices]
    dictionary = (
        bundled_dictionary()
        if args.dictionary == "bundled"
        else build_dictionary([s for s, _ in cleaned])
    )
    tokens = np.array([encode_smiles(s, dictionary) for s, _ in cleaned])
    labels = [label_gap(g).numeric for _, g in cleaned]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(cleaned) == 0:
        tokens = tokens.reshape(0, ENCODED_LENGTH)
    write_encoded_csv(out_dir / "encoded.csv", ids, tokens, labels)
    with open(out_dir / "featurize_report.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "preprocess": report.to_dict(),
                "dictionary": dictionary.to_dict(),
                "output": str(out_dir / "encoded.csv"),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    print(f"encoded {report.kept_count} of {report.input_count} records -> {out_dir / 'encoded.csv'}")
    return 0


def _cmd_train(args) -> int:
    config = RunConfig.from_file(args.config)
    if args.seed is not None:
        config = replace(config, train=replace(config.train, seed=args.seed))
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    if args.backend is not None:
        config = replace(config, train=replace(config.train, backend=args.backend))
    config.validate()
    artifacts = run_experiment(config)
    metrics = artifacts.report["metrics"]
    print(
        f"train accuracy {metrics['mean_train_accuracy']:.3f} "
        f"(std {metrics['std_train_accuracy']:.3f}), "
        f"test accuracy {metrics['mean_test_accuracy']:.3f} "
        f"(std {metrics['std_test_accuracy']:.3f})"
    )
    print(f"report: {artifacts.report_path}")
    print(f"model:  {artifacts.model_path}")
    return 0


def _cmd_eval(args) -> int:
    model_path = Path(args.model)
    if not model_path.is_file():
        raise ConfigurationError(f"model file not found: {model_path}")
    with open(model_path, encoding="utf-8") as fh:
        model = VqcModel.from_dict(json.load(fh))
    features = ingest_features_csv(args.features)
    metrics = evaluate_model(model, features)
    text = json.dumps(metrics, indent=2, sort_keys=True)
    if args.out is None:
        print(text)
    else:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"metrics: {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    path = Path(args.circuit)
    if not path.is_file():
        raise ConfigurationError(f"circuit file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    spec = CircuitSpec.from_dict(doc["circuit"])
    input_state = FockState(tuple(doc["input_state"]))
    u = build_unitary(
        spec,
        np.asarray(doc.get("theta1", []), dtype=float),
        np.asarray(doc.get("theta2", []), dtype=float),
        np.asarray(doc.get("x", []), dtype=float),
    )
    basis = enumerate_basis(input_state.photon_count, spec.mode_count)
    noise = NoiseModel(**doc.get("noise", {}))
    kind = doc.get("distribution", "ideal" if noise.is_ideal else "noisy")
    if kind == "ideal":
        dist = ideal_distribution(u, input_state, basis)
    elif kind == "classical":
        dist = classical_distribution(u, input_state, basis)
    elif kind == "noisy":
        dist = noisy_distribution(u, input_state, basis, noise)
    else:
        raise ConfigurationError(
            f"distribution must be 'ideal', 'classical', or 'noisy', got {kind!r}"
        )
    out_doc = {"distribution": kind, **dist.to_dict()}
    text = json.dumps(out_doc, indent=2, sort_keys=True)
    if args.out is None:
        print(text)
    else:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"distribution: {args.out}")
    return 0


def _cmd_synth(args) -> int:
    features = synthetic_blobs(
        n=args.samples, seed=args.seed, separation=args.separation, spread=args.spread
    )
    out = Path(args.out)
    if out.is_dir():
        out_path = out / "synthetic_features.csv"
    else:
        out_path = out
        out_path.parent.mkdir(parents=True, exist_ok=True)
    write_features_csv(out_path, features)
    counts = features.class_counts()
    print(f"wrote {len(features)} samples ({counts[+1]} VIS, {counts[-1]} NIR) -> {out_path}")
    return 0


_COMMANDS = {
    "featurize": _cmd_featurize,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "simulate": _cmd_simulate,
    "synth": _cmd_synth,
}


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
    except PolyphotonError as exc:
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
    sys.exit(cli())


if __name__ == "__main__":
    main()
