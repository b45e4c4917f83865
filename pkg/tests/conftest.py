from pathlib import Path

import numpy as np
import pytest

from polyphoton.circuits import default_ansatz
from polyphoton.fock import FockState
from polyphoton.model import VqcModel, outcome_space_size
from polyphoton.simulate import NoiseModel

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def make_model(
    seed: int = 0,
    mode_count: int = 5,
    feature_dim: int = 4,
    input_modes: tuple[int, ...] = (0, 2, 4),
    detector: str = "pnr",
    noise: NoiseModel | None = None,
    lam: np.ndarray | None = None,
) -> VqcModel:
    """Random-phase model on the standard layout; seeded and reusable."""
    spec = default_ansatz(mode_count, feature_dim)
    rng = np.random.default_rng(seed)
    occupations = [0] * mode_count
    for mode in input_modes:
        occupations[mode] += 1
    n_out = outcome_space_size(sum(occupations), mode_count, detector)
    if lam is None:
        lam = rng.standard_normal(n_out)
    return VqcModel(
        spec=spec,
        theta1=rng.uniform(0, 2 * np.pi, spec.trainable_counts[0]),
        theta2=rng.uniform(0, 2 * np.pi, spec.trainable_counts[1]),
        lam=lam,
        input_state=FockState(tuple(occupations)),
        noise=noise or NoiseModel(),
        detector=detector,
    )


@pytest.fixture()
def model_factory():
    return make_model
