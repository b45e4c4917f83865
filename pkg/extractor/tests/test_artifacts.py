import csv
import json

import keras
import numpy as np
import pytest

from extractor import (
    ArchitectureConfig,
    DataError,
    ExportError,
    TrainingConfig,
    build_network,
    export_latent,
    load_model,
    read_encoded_csv,
    save_model,
    train_extractor,
    write_encoded_csv,
    write_features_csv,
    write_training_log,
)


def test_encoded_csv_round_trip(tmp_path, small_data):
    tokens, labels = small_data(n=12)
    ids = [f"row-{i}" for i in range(12)]
    path = tmp_path / "enc.csv"
    write_encoded_csv(path, ids, tokens, labels)
    got_ids, got_tokens, got_labels = read_encoded_csv(path)
    assert got_ids == tuple(ids)
    np.testing.assert_array_equal(got_tokens, tokens)
    np.testing.assert_array_equal(got_labels, labels)


def test_encoded_csv_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        read_encoded_csv(tmp_path / "absent.csv")


def test_encoded_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,a,b,label\n", encoding="utf-8")
    with pytest.raises(DataError, match=":1:"):
        read_encoded_csv(path)


def test_encoded_csv_row_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,t0,t1,label\nr0,1,2,+1\nr1,1,oops,-1\n", encoding="utf-8")
    with pytest.raises(DataError, match=":3:"):
        read_encoded_csv(path)
    path.write_text("id,t0,t1,label\nr0,1,2,0\n", encoding="utf-8")
    with pytest.raises(DataError, match="label"):
        read_encoded_csv(path)
    path.write_text("id,t0,t1,label\nr0,-4,2,+1\n", encoding="utf-8")
    with pytest.raises(DataError, match="non-negative"):
        read_encoded_csv(path)


def test_features_csv_format(tmp_path):
    path = tmp_path / "feat.csv"
    write_features_csv(path, ["a", "b"], np.array([[0.25, -1.0], [0.5, 0.125]]), [1, -1])
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["id", "x1", "x2", "label"]
    assert rows[1] == ["a", "0.25", "-1.0", "+1"]
    assert rows[2] == ["b", "0.5", "0.125", "-1"]


def test_container_round_trip_preserves_predictions(tmp_path, small_arch):
    keras.utils.set_random_seed(21)
    model = build_network(small_arch)
    path = tmp_path / "weights.npz"
    save_model(model, small_arch, path)
    loaded, arch = load_model(path)
    assert arch == small_arch
    rng = np.random.default_rng(21)
    tokens = rng.integers(0, small_arch.vocab_size, size=(10, small_arch.sequence_length))
    np.testing.assert_array_equal(
        loaded.predict(tokens, verbose=0), model.predict(tokens, verbose=0)
    )


def test_container_is_plain_npz(tmp_path, small_arch):
    keras.utils.set_random_seed(22)
    model = build_network(small_arch)
    path = tmp_path / "weights.npz"
    save_model(model, small_arch, path)
    container = np.load(path, allow_pickle=False)
    manifest = json.loads(str(container["__manifest__"]))
    assert manifest["architecture"]["latent_dim"] == 2
    stored = {entry["path"] for entry in manifest["weights"]}
    assert stored == set(container.files) - {"__manifest__"}


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "junk.npz"
    path.write_bytes(b"not an archive")
    with pytest.raises(DataError):
        load_model(path)
    with pytest.raises(DataError, match="not found"):
        load_model(tmp_path / "absent.npz")


def test_load_rejects_mismatched_weights(tmp_path, small_arch):
    keras.utils.set_random_seed(23)
    model = build_network(small_arch)
    path = tmp_path / "weights.npz"
    save_model(model, small_arch, path)
    container = dict(np.load(path, allow_pickle=False))
    container.pop("output/bias")
    broken = tmp_path / "broken.npz"
    np.savez(broken, **container)
    with pytest.raises(DataError, match="do not match"):
        load_model(broken)


def test_save_bare_model_requires_architecture(small_arch):
    model = build_network(small_arch)
    with pytest.raises(ExportError, match="ArchitectureConfig"):
        save_model(model, None, "unused.npz")


def test_training_log_documents_choices(tmp_path, small_arch, small_data):
    tokens, labels = small_data(n=40)
    result = train_extractor(tokens, labels, small_arch, TrainingConfig(max_epochs=2, patience=1))
    path = tmp_path / "log.json"
    write_training_log(path, result, notes={"origin": "unit test"})
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["chosen_defaults"]["hidden_units"] == [8, 4]
    assert doc["chosen_defaults"]["batch_size"] == 32
    assert doc["epochs_run"] == result.epochs_run
    assert doc["metrics"]["test_accuracy"] == result.metrics["test_accuracy"]
    assert doc["architecture"] == small_arch.to_dict()
    assert doc["notes"] == {"origin": "unit test"}


def test_export_latent_writes_bounded_features(tmp_path, small_arch, small_data):
    keras.utils.set_random_seed(24)
    model = build_network(small_arch)
    tokens, labels = small_data(n=15)
    ids = [f"r{i}" for i in range(15)]
    path = tmp_path / "features.csv"
    latent = export_latent(model, ids, tokens, labels, path)
    assert latent.shape == (15, 2)
    assert np.abs(latent).max() <= 1.0
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["id", "x1", "x2", "label"]
    assert len(rows) == 16


def test_export_latent_rejects_width_mismatch(small_arch, small_data):
    model = build_network(small_arch)
    tokens, labels = small_data(n=5)
    with pytest.raises(ExportError, match="token matrix"):
        export_latent(model, ["a"] * 5, tokens[:, :7], labels, "unused.csv")


def test_export_latent_rejects_length_mismatch(small_arch, small_data):
    model = build_network(small_arch)
    tokens, labels = small_data(n=5)
    with pytest.raises(ExportError, match="equal length"):
        export_latent(model, ["a", "b"], tokens, labels, "unused.csv")
