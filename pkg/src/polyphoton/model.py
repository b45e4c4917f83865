"""The variational classifier model built on the photonic simulator.

The decision function is linear in the outcome probabilities:

    f(x) = sum_i lam_i * P(outcome_i | U(theta, x))

with the class read off the sign of f. Probabilities come from the exact
simulator or from finite-shot frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .circuits import CircuitSpec, build_unitary
from .exceptions import ConfigurationError, InvalidDatasetError, UnsupportedInputError
from .fock import FockBasis, FockState, enumerate_basis, to_click_pattern
from .simulate import (
    NoiseModel,
    OutputDistribution,
    ideal_distribution,
    noisy_distribution,
    sample_counts,
)

__all__ = [
    "VqcModel",
    "outcome_space_size",
    "model_eval",
    "predict",
    "loss",
    "probability_matrix",
    "spectrum_probe",
]


def outcome_space_size(photon_count: int, mode_count: int, detector: str = "pnr") -> int:
    """Number of measurement outcomes: Fock states (pnr) or click patterns."""
    basis = enumerate_basis(photon_count, mode_count)
    if detector == "pnr":
        return len(basis)
    if detector == "threshold":
        return len({to_click_pattern(s) for s in basis.states})
    raise ConfigurationError(f"detector must be 'pnr' or 'threshold', got {detector!r}")

_TAU = 2.0 * np.pi


def _frozen_array(values, length: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise ConfigurationError(f"{name} has shape {arr.shape}, expected ({length},)")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class VqcModel:
    """Circuit, phases, observable weights, input state, and noise in one bundle.

    Phases are stored reduced to [0, 2pi). The observable weight vector is
    indexed by the Fock basis for photon-number-resolving detection, or by
    the distinct click patterns for threshold detection.
    """

    spec: CircuitSpec
    theta1: np.ndarray
    theta2: np.ndarray
    lam: np.ndarray
    input_state: FockState
    noise: NoiseModel = NoiseModel()
    detector: str = "pnr"
    _outcome_index: np.ndarray = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.detector not in ("pnr", "threshold"):
            raise ConfigurationError(
                f"detector must be 'pnr' or 'threshold', got {self.detector!r}"
            )
        if self.input_state.mode_count != self.spec.mode_count:
            raise ConfigurationError(
                f"input state has {self.input_state.mode_count} modes, circuit has "
                f"{self.spec.mode_count}"
            )
        t1 = np.mod(np.asarray(self.theta1, dtype=float), _TAU)
        t2 = np.mod(np.asarray(self.theta2, dtype=float), _TAU)
        object.__setattr__(
            self, "theta1", _frozen_array(t1, self.spec.trainable_counts[0], "theta1")
        )
        object.__setattr__(
            self, "theta2", _frozen_array(t2, self.spec.trainable_counts[1], "theta2")
        )
        # Map basis states onto the model's outcome space.
        if self.detector == "pnr":
            index = np.arange(len(self.basis))
            n_outcomes = len(self.basis)
        else:
            patterns = sorted(
                {to_click_pattern(s) for s in self.basis.states}, reverse=True
            )
            position = {pat: i for i, pat in enumerate(patterns)}
            index = np.array(
                [position[to_click_pattern(s)] for s in self.basis.states]
            )
            n_outcomes = len(patterns)
        object.__setattr__(self, "_outcome_index", index)
        object.__setattr__(
            self, "lam", _frozen_array(self.lam, n_outcomes, "lam")
        )

    @property
    def basis(self) -> FockBasis:
        return enumerate_basis(self.input_state.photon_count, self.spec.mode_count)

    @property
    def outcome_count(self) -> int:
        return int(self._outcome_index.max()) + 1

    def outcome_labels(self) -> tuple[tuple[int, ...], ...]:
        """Occupation vectors (pnr) or click patterns (threshold), in weight order."""
        labels: list[tuple[int, ...]] = [()] * self.outcome_count
        for state, pos in zip(self.basis.states, self._outcome_index):
            if self.detector == "pnr":
                labels[pos] = state.occupations
            else:
                labels[pos] = to_click_pattern(state)
        return tuple(labels)

    def with_parameters(
        self, theta1=None, theta2=None, lam=None
    ) -> "VqcModel":
        """Copy with some parameter vectors swapped out."""
        return replace(
            self,
            theta1=self.theta1 if theta1 is None else theta1,
            theta2=self.theta2 if theta2 is None else theta2,
            lam=self.lam if lam is None else lam,
        )

    def outcome_probabilities(self, x) -> np.ndarray:
        """Exact outcome probabilities for one feature vector."""
        u = build_unitary(self.spec, self.theta1, self.theta2, x)
        if self.noise.indistinguishability == 1.0:
            dist = ideal_distribution(u, self.input_state, self.basis)
        else:
            dist = noisy_distribution(u, self.input_state, self.basis, self.noise)
        probs = np.zeros(self.outcome_count)
        np.add.at(probs, self._outcome_index, dist.probabilities)
        return probs

    def to_dict(self) -> dict[str, Any]:
        return {
            "circuit": self.spec.to_dict(),
            "theta1": self.theta1.tolist(),
            "theta2": self.theta2.tolist(),
            "lam": self.lam.tolist(),
            "input_state": list(self.input_state.occupations),
            "noise": {
                "source_loss": self.noise.source_loss,
                "indistinguishability": self.noise.indistinguishability,
                "shot_convention": self.noise.shot_convention,
            },
            "detector": self.detector,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "VqcModel":
        try:
            return cls(
                spec=CircuitSpec.from_dict(doc["circuit"]),
                theta1=np.array(doc["theta1"], dtype=float),
                theta2=np.array(doc["theta2"], dtype=float),
                lam=np.array(doc["lam"], dtype=float),
                input_state=FockState(tuple(doc["input_state"])),
                noise=NoiseModel(**doc.get("noise", {})),
                detector=doc.get("detector", "pnr"),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed model document: {exc}") from exc


def _empirical_frequencies(model: VqcModel, x, shots: int, seed) -> np.ndarray:
    probs = model.outcome_probabilities(x)
    effective = model.noise.effective_shots(shots, model.input_state.photon_count)
    if model.outcome_count == len(model.basis):
        dist = OutputDistribution(basis=model.basis, probabilities=probs)
        counts = sample_counts(dist, effective, seed)
    else:
        # threshold detector: same multinomial draw over the collapsed outcomes
        if effective < 1:
            raise ValueError(f"effective shot count {effective} is below 1")
        rng = np.random.default_rng(seed)
        counts = rng.multinomial(int(effective), probs / probs.sum())
    return counts / counts.sum()


def model_eval(model: VqcModel, x, shots: int | None = None, seed=None) -> float:
    """Decision-function value f(x).

    Exact probabilities when ``shots`` is None, empirical finite-shot
    frequencies otherwise (deterministic per seed).
    """
    if shots is None:
        return float(model.lam @ model.outcome_probabilities(x))
    return float(model.lam @ _empirical_frequencies(model, x, shots, seed))


def predict(model: VqcModel, x, shots: int | None = None, seed=None) -> int:
    """Class label sign(f(x)) in {+1, -1}, with sign(0) = +1."""
    return 1 if model_eval(model, x, shots, seed) >= 0.0 else -1


def probability_matrix(
    model: VqcModel, xs, shots: int | None = None, seed=None, workers: int = 1
) -> np.ndarray:
    """Outcome probabilities for a batch of inputs, one row per input.

    In shot mode every row gets its own random stream derived from
    (seed, row index), so the result is identical no matter how many
    workers compute the rows.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if seed is None:
        entropy = [0]
    elif np.isscalar(seed):
        entropy = [int(seed)]
    else:
        entropy = [int(s) for s in seed]

    def row(i: int) -> np.ndarray:
        if shots is None:
            return model.outcome_probabilities(xs[i])
        return _empirical_frequencies(
            model, xs[i], shots, np.random.SeedSequence(entropy + [i])
        )

    if workers > 1 and len(xs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(len(xs))))
    else:
        rows = [row(i) for i in range(len(xs))]
    return np.array(rows)


def loss(
    model: VqcModel,
    xs,
    ys,
    alpha: float,
    shots: int | None = None,
    seed=None,
) -> float:
    """Regularized squared loss (1/2N) sum (y - f(x))^2 + alpha lam.lam.

    Raises:
        InvalidDatasetError: empty dataset.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.asarray(ys, dtype=float)
    if xs.shape[0] == 0 or ys.shape != (xs.shape[0],):
        raise InvalidDatasetError(
            f"need matching non-empty data, got X {xs.shape} and y {ys.shape}"
        )
    p = probability_matrix(model, xs, shots, seed)
    residual = ys - p @ model.lam
    return float(residual @ residual / (2 * len(ys)) + alpha * model.lam @ model.lam)


def spectrum_probe(
    model: VqcModel,
    feature: int,
    grid_size: int,
    x_base=None,
    shots: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Fourier coefficients of f along one feature over a full 2pi period.

    Evaluates f at x_feature = 2 pi g / G, other features fixed at
    ``x_base`` (zeros by default), and returns (frequencies, coefficients)
    centered on w = 0. Exact mode only; the model's frequency support is
    confined to |w| <= photon count.

    Raises:
        UnsupportedInputError: shot mode requested (sampling noise blurs
            the support this probe exists to expose).
        ConfigurationError: grid too small to resolve the support, or a
            feature index out of range.
    """
    if shots is not None:
        raise UnsupportedInputError("spectrum_probe is exact-mode only")
    n = model.input_state.photon_count
    if grid_size < 2 * n + 2:
        raise ConfigurationError(
            f"grid_size {grid_size} cannot resolve frequencies up to {n}; "
            f"need at least {2 * n + 2}"
        )
    k = model.spec.feature_dim
    if not 0 <= feature < k:
        raise ConfigurationError(f"feature index {feature} out of range for k={k}")
    base = np.zeros(k) if x_base is None else np.asarray(x_base, dtype=float).copy()
    if base.shape != (k,):
        raise ConfigurationError(f"x_base has shape {base.shape}, expected ({k},)")

    values = np.empty(grid_size)
    for g in range(grid_size):
        x = base.copy()
        x[feature] = _TAU * g / grid_size
        values[g] = model_eval(model, x)
    coeffs = np.fft.fftshift(np.fft.fft(values)) / grid_size
    freqs = np.fft.fftshift(np.fft.fftfreq(grid_size, d=1.0 / grid_size)).astype(int)
    return freqs, coeffs
