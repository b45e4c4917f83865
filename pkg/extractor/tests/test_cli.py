import json

import numpy as np

from extractor import read_encoded_csv
from extractor.cli import cli


def test_synth_writes_encoded_csv(tmp_path):
    out = tmp_path / "enc.csv"
    assert cli(["synth", "--samples", "30", "--seed", "5", "--out", str(out)]) == 0
    ids, tokens, labels = read_encoded_csv(out)
    assert len(ids) == 30
    assert tokens.shape == (30, 139)
    assert int((labels == 1).sum()) == 15


def test_train_then_export(tmp_path):
    enc = tmp_path / "enc.csv"
    assert cli(["synth", "--samples", "40", "--seed", "1", "--out", str(enc)]) == 0
    run = tmp_path / "run"
    code = cli(
        [
            "train",
            str(enc),
            "--out",
            str(run),
            "--max-epochs",
            "4",
            "--patience",
            "2",
            "--seed",
            "0",
        ]
    )
    assert code == 0
    log = json.loads((run / "training_log.json").read_text(encoding="utf-8"))
    assert log["epochs_run"] <= 4
    assert log["training"]["max_epochs"] == 4

    feats = tmp_path / "features.csv"
    code = cli(
        ["export", "--weights", str(run / "weights.npz"), "--encoded", str(enc), "--out", str(feats)]
    )
    assert code == 0
    body = feats.read_text(encoding="utf-8").strip().splitlines()
    assert body[0] == "id,x1,x2,label"
    assert len(body) == 41
    values = np.array([[float(v) for v in line.split(",")[1:3]] for line in body[1:]])
    assert np.abs(values).max() <= 1.0


def test_missing_encoded_file_exits_2(tmp_path):
    assert cli(["train", str(tmp_path / "absent.csv"), "--out", str(tmp_path)]) == 2


def test_bad_patience_exits_2(tmp_path):
    enc = tmp_path / "enc.csv"
    cli(["synth", "--samples", "20", "--out", str(enc)])
    code = cli(["train", str(enc), "--out", str(tmp_path), "--max-epochs", "5", "--patience", "9"])
    assert code == 2


def test_corrupt_weights_exit_2(tmp_path):
    enc = tmp_path / "enc.csv"
    cli(["synth", "--samples", "10", "--out", str(enc)])
    junk = tmp_path / "junk.npz"
    junk.write_bytes(b"zzz")
    code = cli(["export", "--weights", str(junk), "--encoded", str(enc), "--out", str(tmp_path / "f.csv")])
    assert code == 2


def test_unknown_flag_exits_2():
    assert cli(["synth", "--bogus"]) == 2


def test_help_exits_0():
    assert cli(["--help"]) == 0
