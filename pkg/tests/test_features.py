import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.exceptions import NotFittedError

from polyphoton.exceptions import (
    CsvFormatError,
    GapRangeError,
    InvalidDatasetError,
    InvalidDimensionError,
    OverlongSmilesError,
    SplitError,
    UnknownTokenError,
)
from polyphoton.features import (
    ENCODED_LENGTH,
    FeatureSet,
    Standardizer,
    TokenDictionary,
    augment,
    balanced_subsample,
    build_dictionary,
    bundled_dictionary,
    encode_smiles,
    label_gap,
    preprocess_dataset,
    read_encoded_csv,
    read_smiles_csv,
    stratified_split,
    write_encoded_csv,
)

POLYSTYRENE = "C=CC1=CC=CC=C1"
POLYSTYRENE_TOKENS = [19, 17, 19, 19, 8, 17, 19, 19, 17, 19, 19, 17, 19, 8]


def labeled_set(n_pos, n_neg, seed=0, dim=2):
    rng = np.random.default_rng(seed)
    n = n_pos + n_neg
    return FeatureSet(
        ids=tuple(f"s{i}" for i in range(n)),
        x=rng.standard_normal((n, dim)),
        y=np.concatenate([np.ones(n_pos), -np.ones(n_neg)]),
    )


def test_bundled_dictionary_layout():
    d = bundled_dictionary()
    assert len(d) == 34
    assert d.index("#") == 0
    assert d.index("C") == 19
    assert d.index("=") == 17
    assert d.index("1") == 8
    assert d.index("s") == 33
    assert set(d.inferred_tokens) == {"(", ")", "+", "-"}


def test_dictionary_rejects_unknown_token():
    d = bundled_dictionary()
    assert "C" in d
    assert "X" not in d
    with pytest.raises(UnknownTokenError):
        d.index("X")


def test_dictionary_must_be_dense_and_sorted():
    with pytest.raises(Exception):
        TokenDictionary(token_to_index={"a": 0, "b": 2})
    with pytest.raises(Exception):
        TokenDictionary(token_to_index={"b": 0, "a": 1})


def test_build_dictionary_sorted_order():
    d = build_dictionary(["CBA", "AD"])
    assert [d.index(c) for c in "ABCD"] == [0, 1, 2, 3]
    with pytest.raises(InvalidDatasetError):
        build_dictionary([])


def test_encode_polystyrene_frozen_vector():
    d = bundled_dictionary()
    vec = encode_smiles(POLYSTYRENE, d)
    assert vec.shape == (ENCODED_LENGTH,)
    assert vec.dtype == np.int64
    assert vec[: len(POLYSTYRENE_TOKENS)].tolist() == POLYSTYRENE_TOKENS
    assert np.all(vec[len(POLYSTYRENE_TOKENS):] == 0)


def test_encode_rejects_overlong():
    d = bundled_dictionary()
    with pytest.raises(OverlongSmilesError):
        encode_smiles("C" * (ENCODED_LENGTH + 1), d)


def test_gap_label_boundaries():
    assert label_gap(0.3).class_name == "MIR"
    assert label_gap(0.4).class_name == "MIR"
    assert label_gap(0.4).numeric is None
    assert label_gap(0.41).numeric == -1
    assert label_gap(1.6).numeric == -1
    assert label_gap(1.61).numeric == +1
    assert label_gap(4.0).numeric == +1
    for bad in (0.01, 4.5, float("nan"), float("inf")):
        with pytest.raises(GapRangeError):
            label_gap(bad)


def test_preprocess_drop_ordering_and_counts():
    records = [
        ("C" * 200, 2.0),        # overlong
        ("CCO", 9.0),            # gap out of range
        ("CCN", 0.3),            # MIR
        ("CCC", 2.0),
        ("CCC", 2.1),            # duplicate smiles
        ("CCS", 2.2),
        ("CCF", 1.9),
    ]
    cleaned, report = preprocess_dataset(records)
    assert report.input_count == 7
    assert report.dropped_overlong == 1
    assert report.dropped_bad_gap == 1
    assert report.dropped_mir == 1
    assert report.dropped_duplicate == 1
    assert report.kept_count == 3
    assert [s for s, _ in cleaned] == ["CCC", "CCS", "CCF"]
    assert report.kept_indices == (3, 5, 6)


def test_preprocess_outlier_trim_is_idempotent():
    gaps = [2.0 + 0.002 * i for i in range(20)] + [3.6]
    records = [(f"{'C' * (i + 1)}", g) for i, g in enumerate(gaps)]
    cleaned, report = preprocess_dataset(records)
    assert report.dropped_outlier >= 1
    again, report2 = preprocess_dataset(cleaned)
    assert again == cleaned
    assert report2.dropped_outlier == 0


def test_preprocess_constant_gaps_skip_trimming():
    records = [("C", 2.0), ("CC", 2.0), ("CCC", 2.0)]
    cleaned, report = preprocess_dataset(records)
    assert report.kept_count == 3
    assert report.dropped_outlier == 0


def test_preprocess_empty_result_flagged():
    cleaned, report = preprocess_dataset([("C", 0.3)])
    assert cleaned == []
    assert report.empty_result


def test_standardizer_basic():
    rng = np.random.default_rng(1)
    x = rng.normal(5.0, 3.0, (200, 3))
    s = Standardizer().fit(x)
    z = s.transform(x)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-12)


def test_standardizer_constant_dimension_passthrough():
    x = np.array([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]])
    with pytest.warns(UserWarning, match="constant"):
        s = Standardizer().fit(x)
    z = s.transform(x)
    np.testing.assert_array_equal(z[:, 1], x[:, 1])
    assert s.constant_dims_.tolist() == [False, True]


def test_standardizer_errors():
    with pytest.raises(NotFittedError):
        Standardizer().transform(np.ones((2, 2)))
    s = Standardizer().fit(np.random.default_rng(0).normal(size=(5, 2)))
    with pytest.raises(InvalidDimensionError):
        s.transform(np.ones((2, 3)))


def test_augment_appends_squares():
    out = augment(np.array([0.5, -0.2]))
    np.testing.assert_allclose(out, [0.5, -0.2, 0.25, 0.04])
    batch = augment(np.array([[1.0, 2.0], [3.0, -1.0]]))
    np.testing.assert_allclose(batch, [[1, 2, 1, 4], [3, -1, 9, 1]])
    with pytest.raises(InvalidDimensionError):
        augment(np.ones(3))


def test_feature_set_validation():
    with pytest.raises(InvalidDatasetError):
        FeatureSet(ids=("a",), x=np.ones((1, 2)), y=np.array([2.0]))
    with pytest.raises(InvalidDatasetError):
        FeatureSet(ids=("a", "b"), x=np.ones((1, 2)), y=np.array([1.0]))
    with pytest.raises(InvalidDatasetError):
        FeatureSet(
            ids=("a",), x=np.array([[np.nan, 1.0]]), y=np.array([1.0])
        )
    fs = labeled_set(3, 2)
    assert len(fs) == 5
    assert fs.feature_dim == 2
    assert fs.class_counts() == {1: 3, -1: 2}


def test_stratified_split_ceil_quota_sizes():
    split = stratified_split(labeled_set(279, 278), test_fraction=0.25, seed=0)
    assert len(split.test) == math.ceil(557 * 0.25)  # 140
    assert len(split.train) == 417
    split_big = stratified_split(labeled_set(2700, 2581), test_fraction=0.25, seed=1)
    assert len(split_big.test) == 1321
    assert len(split_big.train) == 3960


def test_stratified_split_partition_and_balance():
    fs = labeled_set(60, 40, seed=3)
    split = stratified_split(fs, test_fraction=0.3, seed=7)
    train_ids = set(split.train.ids)
    test_ids = set(split.test.ids)
    assert train_ids.isdisjoint(test_ids)
    assert train_ids | test_ids == set(fs.ids)
    # per-class test share within one sample of the global fraction
    for cls in (+1, -1):
        total = fs.class_counts()[cls]
        in_test = split.test.class_counts().get(cls, 0)
        assert abs(in_test - 0.3 * total) <= 1.0


def test_stratified_split_deterministic():
    fs = labeled_set(30, 30, seed=2)
    a = stratified_split(fs, 0.25, seed=5)
    b = stratified_split(fs, 0.25, seed=5)
    c = stratified_split(fs, 0.25, seed=6)
    assert a.test.ids == b.test.ids
    assert a.test.ids != c.test.ids


def test_stratified_split_validation():
    fs = labeled_set(10, 10)
    with pytest.raises(SplitError):
        stratified_split(fs, 0.0)
    with pytest.raises(SplitError):
        stratified_split(fs, 1.0)
    lopsided = labeled_set(10, 1)
    with pytest.raises(SplitError):
        stratified_split(lopsided, 0.25)


def test_balanced_subsample_counts():
    fs = labeled_set(300, 334, seed=4)
    sub = balanced_subsample(fs, size=557, seed=0)
    counts = sub.class_counts()
    assert sum(counts.values()) == 557
    assert abs(counts[1] - counts[-1]) == 1
    assert counts[-1] > counts[1]  # extra sample goes to the larger class
    even = balanced_subsample(fs, size=300, seed=0)
    assert even.class_counts() == {1: 150, -1: 150}


def test_balanced_subsample_validation():
    fs = labeled_set(20, 5)
    with pytest.raises(SplitError):
        balanced_subsample(fs, size=0)
    with pytest.raises(SplitError):
        balanced_subsample(fs, size=26)
    with pytest.raises(SplitError):
        balanced_subsample(fs, size=12)  # needs 6 of the 5 minority samples
    with pytest.raises(SplitError):
        balanced_subsample(labeled_set(2, 2), size=1)


def test_smiles_csv_roundtrip(tmp_path):
    path = tmp_path / "smiles.csv"
    path.write_text("id,smiles,gap_ev\np1,CCO,1.1\np2,C=C,2.4\n")
    rows = read_smiles_csv(path)
    assert rows == [("p1", "CCO", 1.1), ("p2", "C=C", 2.4)]


def test_smiles_csv_errors_name_the_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,smiles,gap_ev\np1,CCO,not-a-number\n")
    with pytest.raises(CsvFormatError, match=":2:"):
        read_smiles_csv(path)
    header = tmp_path / "badheader.csv"
    header.write_text("id,smiles\n")
    with pytest.raises(CsvFormatError):
        read_smiles_csv(header)


def test_encoded_csv_roundtrip(tmp_path):
    d = bundled_dictionary()
    tokens = np.stack([encode_smiles("CCO", d), encode_smiles("C=C", d)])
    path = tmp_path / "enc.csv"
    write_encoded_csv(path, ["a", "b"], tokens, [1, -1])
    ids, back, labels = read_encoded_csv(path)
    assert ids == ("a", "b")
    np.testing.assert_array_equal(back, tokens)
    np.testing.assert_array_equal(labels, [1, -1])
    header = path.read_text().splitlines()[0]
    assert header.startswith("id,t0,t1,") and header.endswith(",t138,label")


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet=sorted(bundled_dictionary().token_to_index), max_size=139))
def test_encode_properties(s):
    d = bundled_dictionary()
    vec = encode_smiles(s, d)
    assert vec.shape == (ENCODED_LENGTH,)
    assert np.all((vec >= 0) & (vec < 34))
    assert np.all(vec[len(s):] == 0)
    for i, ch in enumerate(s):
        assert vec[i] == d.index(ch)


@settings(max_examples=25, deadline=None)
@given(
    n_pos=st.integers(min_value=4, max_value=40),
    n_neg=st.integers(min_value=4, max_value=40),
    seed=st.integers(min_value=0, max_value=100),
)
def test_split_partition_property(n_pos, n_neg, seed):
    fs = labeled_set(n_pos, n_neg, seed=seed)
    split = stratified_split(fs, 0.25, seed=seed)
    assert len(split.test) == math.ceil(0.25 * len(fs))
    assert sorted(split.train.ids + split.test.ids) == sorted(fs.ids)
