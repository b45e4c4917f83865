import numpy as np
import pytest

from polyphoton.circuits import (
    BeamSplitter,
    CircuitSpec,
    DataBound,
    Fixed,
    PhaseShifter,
    Trainable,
    build_unitary,
    default_ansatz,
    element_matrix,
)
from polyphoton.exceptions import BindingError, ConfigurationError


def random_args(spec, seed=0):
    rng = np.random.default_rng(seed)
    c1, c2 = spec.trainable_counts
    return (
        rng.uniform(0, 2 * np.pi, c1),
        rng.uniform(0, 2 * np.pi, c2),
        rng.uniform(0, 2 * np.pi, spec.feature_dim),
    )


def test_default_ansatz_shape():
    spec = default_ansatz(5, 4)
    assert spec.mode_count == 5
    assert spec.feature_dim == 4
    assert spec.trainable_counts == (20, 20)
    # 10 mesh pairs per block, each a phase shifter + beam splitter,
    # plus one data phase per feature
    assert len(spec.elements) == 20 + 4 + 20


def test_build_unitary_is_unitary():
    spec = default_ansatz(5, 4)
    t1, t2, x = random_args(spec, seed=7)
    u = build_unitary(spec, t1, t2, x)
    assert u.shape == (5, 5)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_unitary_2pi_periodic():
    spec = default_ansatz(5, 4)
    t1, t2, x = random_args(spec, seed=11)
    u1 = build_unitary(spec, t1, t2, x)
    u2 = build_unitary(spec, t1 + 2 * np.pi, t2, x)
    np.testing.assert_allclose(u1, u2, atol=1e-12)


def test_beam_splitter_convention():
    theta = 0.3
    m = element_matrix(
        BeamSplitter((0, 1), Fixed(theta)), mode_count=2
    )
    c, s = np.cos(theta), np.sin(theta)
    expected = np.array([[c, 1j * s], [1j * s, c]])
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_phase_shifter_matrix():
    m = element_matrix(PhaseShifter(1, Fixed(0.5)), mode_count=3)
    expected = np.diag([1.0, np.exp(0.5j), 1.0])
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_data_phase_applied_raw():
    # Data phases enter without rescaling: the element equals exp(i x_j).
    spec = CircuitSpec(
        mode_count=2,
        elements=(PhaseShifter(0, DataBound(0)),),
        feature_dim=1,
    )
    u = build_unitary(spec, (), (), [1.234])
    np.testing.assert_allclose(u, np.diag([np.exp(1.234j), 1.0]), atol=1e-15)


def test_adjacent_modes_only():
    with pytest.raises(ConfigurationError):
        CircuitSpec(
            mode_count=3,
            elements=(BeamSplitter((0, 2), Fixed(0.1)),),
            feature_dim=0,
        )


def test_stage_ordering_enforced():
    # A first-block trainable after a data phase breaks the sandwich.
    with pytest.raises(ConfigurationError):
        CircuitSpec(
            mode_count=2,
            elements=(
                PhaseShifter(0, DataBound(0)),
                PhaseShifter(1, Trainable(1, 0)),
            ),
            feature_dim=1,
        )
    # Data after the second block likewise.
    with pytest.raises(ConfigurationError):
        CircuitSpec(
            mode_count=2,
            elements=(
                PhaseShifter(0, Trainable(2, 0)),
                PhaseShifter(1, DataBound(0)),
            ),
            feature_dim=1,
        )


def test_slots_must_be_dense():
    with pytest.raises(ConfigurationError):
        CircuitSpec(
            mode_count=2,
            elements=(
                PhaseShifter(0, Trainable(1, 0)),
                PhaseShifter(1, Trainable(1, 2)),
            ),
            feature_dim=0,
        )
    with pytest.raises(ConfigurationError):
        CircuitSpec(
            mode_count=2,
            elements=(
                PhaseShifter(0, Trainable(1, 0)),
                PhaseShifter(1, Trainable(1, 0)),
            ),
            feature_dim=0,
        )


def test_feature_index_bounds():
    with pytest.raises(ConfigurationError):
        CircuitSpec(
            mode_count=2,
            elements=(PhaseShifter(0, DataBound(1)),),
            feature_dim=1,
        )


def test_argument_shape_checks():
    spec = default_ansatz(5, 4)
    t1, t2, x = random_args(spec)
    with pytest.raises(ConfigurationError):
        build_unitary(spec, t1[:-1], t2, x)
    with pytest.raises(ConfigurationError):
        build_unitary(spec, t1, t2, x[:-1])


def test_binding_out_of_range():
    with pytest.raises(BindingError):
        element_matrix(
            PhaseShifter(0, Trainable(1, 3)), mode_count=2, theta1=(0.1,)
        )
    with pytest.raises(BindingError):
        element_matrix(PhaseShifter(0, DataBound(0)), mode_count=2, x=())


def test_trainable_cap_freezes_surplus():
    spec = default_ansatz(5, 4, max_trainable_per_block=16)
    assert spec.trainable_counts == (16, 16)

    def binding(el):
        return el.phase if isinstance(el, PhaseShifter) else el.angle

    fixed = [el for el in spec.elements if isinstance(binding(el), Fixed)]
    assert len(fixed) == 8
    assert all(binding(el).value == 0.0 for el in fixed)
    t1, t2, x = random_args(spec, seed=3)
    u = build_unitary(spec, t1, t2, x)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_default_ansatz_rejects_bad_geometry():
    with pytest.raises(ConfigurationError):
        default_ansatz(1, 1)
    with pytest.raises(ConfigurationError):
        default_ansatz(5, 0)
    with pytest.raises(ConfigurationError):
        default_ansatz(5, 6)


def test_serialization_roundtrip():
    spec = default_ansatz(5, 4, max_trainable_per_block=16)
    doc = spec.to_dict()
    back = CircuitSpec.from_dict(doc)
    assert back == spec
    t1, t2, x = random_args(spec, seed=5)
    np.testing.assert_allclose(
        build_unitary(spec, t1, t2, x), build_unitary(back, t1, t2, x)
    )


def test_from_dict_rejects_malformed():
    with pytest.raises(ConfigurationError):
        CircuitSpec.from_dict({"schema_version": 99})
    spec = default_ansatz(3, 2)
    doc = spec.to_dict()
    doc["elements"][0]["kind"] = "mystery"
    with pytest.raises(ConfigurationError):
        CircuitSpec.from_dict(doc)
    with pytest.raises(ConfigurationError):
        CircuitSpec.from_dict({"schema_version": 1, "mode_count": 3})
