"""Bosonic Fock occupation states for n photons in m modes.

The basis over which output statistics and observable weights are indexed
is the set of all occupation vectors of length m summing to n, ordered
lexicographically descending so that (n, 0, ..., 0) always comes first.
That order is total and stable, which keeps observable-weight indexing
reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Iterator

from .exceptions import InvalidDimensionError, NotInBasisError

__all__ = [
    "FockState",
    "FockBasis",
    "enumerate_basis",
    "index_of",
    "occupancy_factor",
    "to_click_pattern",
]


@dataclass(frozen=True)
class FockState:
    """Occupation-number state: photon count per optical mode."""

    occupations: tuple[int, ...]

    def __post_init__(self) -> None:
        occ = tuple(int(v) for v in self.occupations)
        if len(occ) == 0:
            raise InvalidDimensionError("a Fock state needs at least one mode")
        if any(v < 0 for v in occ):
            raise InvalidDimensionError(f"negative occupation in {occ}")
        object.__setattr__(self, "occupations", occ)

    @property
    def mode_count(self) -> int:
        return len(self.occupations)

    @property
    def photon_count(self) -> int:
        return sum(self.occupations)

    def __iter__(self) -> Iterator[int]:
        return iter(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    # Occupation vectors of length m summing to n, lexicographically descending.
    if m == 1:
        yield (n,)
        return
    for head in range(n, -1, -1):
        for tail in _compositions(n - head, m - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class FockBasis:
    """All n-photon occupation states over m modes, canonically ordered."""

    photon_count: int
    mode_count: int
    states: tuple[FockState, ...]
    _index: dict[tuple[int, ...], int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self._index:
            object.__setattr__(
                self, "_index", {s.occupations: i for i, s in enumerate(self.states)}
            )

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[FockState]:
        return iter(self.states)

    def index_of(self, state: FockState) -> int:
        """Position of ``state`` in the canonical order.

        Raises:
            NotInBasisError: wrong mode count, wrong photon number, or a
                state that is not a member of this basis.
        """
        key = tuple(state.occupations) if isinstance(state, FockState) else tuple(state)
        idx = self._index.get(key)
        if idx is None:
            raise NotInBasisError(
                f"state {key} is not in the ({self.photon_count} photon, "
                f"{self.mode_count} mode) basis"
            )
        return idx


@lru_cache(maxsize=None)
def enumerate_basis(photon_count: int, mode_count: int) -> FockBasis:
    """Enumerate the full Fock basis for ``photon_count`` photons in ``mode_count`` modes.

    The basis has C(n + m - 1, n) states, ordered lexicographically
    descending on the occupation vectors. The result is cached and shared
    read-only; bases are immutable.

    Args:
        photon_count: number of photons, n >= 0
        mode_count: number of optical modes, m >= 1

    Raises:
        InvalidDimensionError: ``mode_count`` < 1 or ``photon_count`` < 0.
    """
    if mode_count < 1:
        raise InvalidDimensionError(f"mode_count must be >= 1, got {mode_count}")
    if photon_count < 0:
        raise InvalidDimensionError(f"photon_count must be >= 0, got {photon_count}")
    states = tuple(FockState(occ) for occ in _compositions(photon_count, mode_count))
    assert len(states) == comb(photon_count + mode_count - 1, photon_count)
    return FockBasis(photon_count=photon_count, mode_count=mode_count, states=states)


def index_of(basis: FockBasis, state: FockState) -> int:
    """Canonical index of ``state`` in ``basis``; bijective over the basis."""
    return basis.index_of(state)


def occupancy_factor(state: FockState) -> int:
    """Product of factorials of the occupations (amplitude normalization)."""
    result = 1
    for n in state.occupations:
        result *= factorial(n)
    return result


def to_click_pattern(state: FockState) -> tuple[int, ...]:
    """Threshold-detector view of a Fock state: 1 per occupied mode."""
    return tuple(1 if n > 0 else 0 for n in state.occupations)
