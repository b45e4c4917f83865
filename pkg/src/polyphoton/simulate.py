"""Photon-number statistics at the output of a linear-optical circuit.

Amplitudes are matrix permanents of row/column-repeated submatrices of the
circuit unitary. The noise model covers partially distinguishable photons
(each photon is independently "ideal" with probability p, else classical)
and source loss, which under post-selection only rescales the shot budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import sqrt
from typing import Any

import numpy as np

from .exceptions import (
    ConfigurationError,
    InvalidDimensionError,
    InvalidTransitionError,
    UnsupportedInputError,
)
from .fock import FockBasis, FockState, enumerate_basis, occupancy_factor

__all__ = [
    "NoiseModel",
    "OutputDistribution",
    "permanent",
    "transition_amplitude",
    "ideal_distribution",
    "classical_distribution",
    "noisy_distribution",
    "sample_counts",
]

# Mass below this is numerical noise; clamped to zero before use.
_CLAMP = 1e-12
_SUM_TOL = 1e-9


@dataclass(frozen=True)
class NoiseModel:
    """Source imperfections of a single-photon input.

    Attributes:
        source_loss: probability a given photon is lost before the circuit
        indistinguishability: probability a given photon interferes
            quantum-mechanically with the others
        shot_convention: "postselected" counts shots after conditioning on
            all photons arriving; "preloss" counts emitted-state attempts
    """

    source_loss: float = 0.0
    indistinguishability: float = 1.0
    shot_convention: str = "postselected"

    def __post_init__(self) -> None:
        if not 0.0 <= self.source_loss <= 1.0:
            raise ConfigurationError(f"source_loss must be in [0,1], got {self.source_loss}")
        if not 0.0 <= self.indistinguishability <= 1.0:
            raise ConfigurationError(
                f"indistinguishability must be in [0,1], got {self.indistinguishability}"
            )
        if self.shot_convention not in ("postselected", "preloss"):
            raise ConfigurationError(
                f"shot_convention must be 'postselected' or 'preloss', "
                f"got {self.shot_convention!r}"
            )

    @property
    def is_ideal(self) -> bool:
        return self.source_loss == 0.0 and self.indistinguishability == 1.0

    def effective_shots(self, shots: int, photon_count: int) -> int:
        """Shots surviving n-fold post-selection.

        Under the default "postselected" convention the requested shots
        already count coincidence events, so loss changes nothing. Under
        "preloss" each photon independently survives with probability
        (1 - source_loss).
        """
        if self.shot_convention == "postselected":
            return int(shots)
        return int(round(shots * (1.0 - self.source_loss) ** photon_count))


@dataclass(frozen=True)
class OutputDistribution:
    """Probability vector over a Fock basis, validated and clamped."""

    basis: FockBasis
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.shape != (len(self.basis),):
            raise InvalidDimensionError(
                f"probability vector has shape {probs.shape}, basis has "
                f"{len(self.basis)} states"
            )
        if probs.min(initial=0.0) < -_CLAMP:
            raise ValueError(
                f"probability {probs.min()} below the -{_CLAMP} clamp threshold"
            )
        probs = np.where(probs < _CLAMP, 0.0, probs)
        total = probs.sum()
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, expected 1 within {_SUM_TOL}")
        probs.flags.writeable = False
        object.__setattr__(self, "probabilities", probs)

    def prob_of(self, state: FockState) -> float:
        return float(self.probabilities[self.basis.index_of(state)])

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready dump for debugging and the CLI."""
        return {
            "photon_count": self.basis.photon_count,
            "mode_count": self.basis.mode_count,
            "outcomes": [
                {"state": list(s.occupations), "probability": float(p)}
                for s, p in zip(self.basis.states, self.probabilities)
            ],
        }


def permanent(a: np.ndarray) -> complex:
    """Matrix permanent via Ryser's formula with Gray-code subset updates.

    O(2^d * d) for a d x d matrix; Per of the empty matrix is 1.

    Raises:
        InvalidDimensionError: input is not a square 2-d matrix.
    """
    mat = np.asarray(a, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidDimensionError(f"permanent needs a square matrix, got shape {mat.shape}")
    d = mat.shape[0]
    if d == 0:
        return complex(1.0)
    rows = [list(mat[i]) for i in range(d)]
    row_sums = [0j] * d
    total = 0j
    gray = 0
    for k in range(1, 1 << d):
        bit = (k & -k).bit_length() - 1
        mask = 1 << bit
        gray ^= mask
        if gray & mask:
            for i in range(d):
                row_sums[i] += rows[i][bit]
        else:
            for i in range(d):
                row_sums[i] -= rows[i][bit]
        prod = complex(1.0)
        for i in range(d):
            prod *= row_sums[i]
        if gray.bit_count() & 1:
            total -= prod
        else:
            total += prod
    return total if d % 2 == 0 else -total


def transition_amplitude(u: np.ndarray, input: FockState, output: FockState) -> complex:
    """Amplitude <output| U |input> for photons through an m-mode unitary.

    Per(U_sub) / sqrt(prod(input!) * prod(output!)), where U_sub repeats
    column j input_j times and row i output_i times.

    Raises:
        InvalidDimensionError: U shape does not match the states' mode count.
        InvalidTransitionError: photon numbers of input and output differ.
    """
    mat = np.asarray(u, dtype=complex)
    m = input.mode_count
    if output.mode_count != m:
        raise InvalidTransitionError(
            f"input has {m} modes, output has {output.mode_count}"
        )
    if mat.shape != (m, m):
        raise InvalidDimensionError(f"unitary shape {mat.shape} does not match {m} modes")
    if input.photon_count != output.photon_count:
        raise InvalidTransitionError(
            f"photon number mismatch: input {input.photon_count}, "
            f"output {output.photon_count}"
        )
    cols = [j for j in range(m) for _ in range(input.occupations[j])]
    rows = [i for i in range(m) for _ in range(output.occupations[i])]
    sub = mat[np.ix_(rows, cols)]
    norm = sqrt(occupancy_factor(input) * occupancy_factor(output))
    return permanent(sub) / norm


def ideal_distribution(u: np.ndarray, input: FockState, basis: FockBasis) -> OutputDistribution:
    """Exact output distribution for perfectly indistinguishable photons."""
    _check_basis(input, basis)
    probs = np.empty(len(basis))
    for i, state in enumerate(basis.states):
        amp = transition_amplitude(u, input, state)
        probs[i] = abs(amp) ** 2
    return OutputDistribution(basis=basis, probabilities=probs)


def _check_basis(input: FockState, basis: FockBasis) -> None:
    if basis.mode_count != input.mode_count or basis.photon_count != input.photon_count:
        raise InvalidTransitionError(
            f"basis is ({basis.photon_count} photon, {basis.mode_count} mode) but "
            f"input is ({input.photon_count} photon, {input.mode_count} mode)"
        )


def _landing_table(weights: np.ndarray, sources: tuple[int, ...]) -> dict[tuple[int, ...], float]:
    # Occupation distribution of independent classical particles, one per
    # entry of `sources`, landing via the |U|^2 transition table.
    m = weights.shape[0]
    zero = tuple([0] * m)
    if not sources:
        return {zero: 1.0}
    table: dict[tuple[int, ...], float] = {}
    for assignment in product(range(m), repeat=len(sources)):
        p = 1.0
        for target, source in zip(assignment, sources):
            p *= weights[target, source]
        occ = [0] * m
        for target in assignment:
            occ[target] += 1
        key = tuple(occ)
        table[key] = table.get(key, 0.0) + p
    return table


def classical_distribution(
    u: np.ndarray, input: FockState, basis: FockBasis
) -> OutputDistribution:
    """Output distribution of fully distinguishable (classical) particles.

    Each particle from input mode j lands in mode i with probability
    |U_ij|^2, independently; computed by exhaustive enumeration, so meant
    for few photons only.
    """
    _check_basis(input, basis)
    mat = np.asarray(u, dtype=complex)
    m = input.mode_count
    if mat.shape != (m, m):
        raise InvalidDimensionError(f"unitary shape {mat.shape} does not match {m} modes")
    weights = np.abs(mat) ** 2
    sources = tuple(j for j in range(m) for _ in range(input.occupations[j]))
    probs = np.zeros(len(basis))
    for occ, p in _landing_table(weights, sources).items():
        probs[basis.index_of(FockState(occ))] += p
    return OutputDistribution(basis=basis, probabilities=probs)


def noisy_distribution(
    u: np.ndarray, input: FockState, basis: FockBasis, noise: NoiseModel
) -> OutputDistribution:
    """Output distribution with partially distinguishable photons.

    Mixture over subsets S of the input photons with weight
    p^|S| (1-p)^(n-|S|), p = indistinguishability: photons in S interfere
    quantum-mechanically, the rest propagate classically; the two partial
    occupation patterns add. Source loss does not enter here: post-selected
    on all n photons arriving, uniform loss leaves the distribution
    unchanged and only shrinks the effective shot count.

    Raises:
        UnsupportedInputError: some input mode holds more than one photon.
    """
    _check_basis(input, basis)
    if any(v > 1 for v in input.occupations):
        raise UnsupportedInputError(
            f"noise model requires single-photon input occupations, got "
            f"{input.occupations}"
        )
    p = noise.indistinguishability
    mat = np.asarray(u, dtype=complex)
    m = input.mode_count
    if mat.shape != (m, m):
        raise InvalidDimensionError(f"unitary shape {mat.shape} does not match {m} modes")
    photons = tuple(j for j, v in enumerate(input.occupations) if v == 1)
    n = len(photons)
    weights = np.abs(mat) ** 2
    probs = np.zeros(len(basis))
    for mask in range(1 << n):
        s = mask.bit_count()
        w = p**s * (1.0 - p) ** (n - s)
        if w == 0.0:
            continue
        quantum = tuple(photons[i] for i in range(n) if mask & (1 << i))
        classical = tuple(photons[i] for i in range(n) if not mask & (1 << i))
        sub_occ = [0] * m
        for j in quantum:
            sub_occ[j] = 1
        sub_basis = enumerate_basis(s, m)
        quantum_dist = ideal_distribution(mat, FockState(tuple(sub_occ)), sub_basis)
        classical_table = _landing_table(weights, classical)
        for q_state, q_prob in zip(sub_basis.states, quantum_dist.probabilities):
            if q_prob == 0.0:
                continue
            for c_occ, c_prob in classical_table.items():
                combined = tuple(a + b for a, b in zip(q_state.occupations, c_occ))
                probs[basis.index_of(FockState(combined))] += w * q_prob * c_prob
    return OutputDistribution(basis=basis, probabilities=probs)


def sample_counts(dist: OutputDistribution, shots: int, seed) -> np.ndarray:
    """Multinomial counts over the distribution's outcomes; deterministic per seed.

    Raises:
        ValueError: shots < 1.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    pvals = np.asarray(dist.probabilities, dtype=float)
    pvals = pvals / pvals.sum()
    rng = np.random.default_rng(seed)
    return rng.multinomial(int(shots), pvals)
