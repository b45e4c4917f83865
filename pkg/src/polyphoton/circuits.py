"""Parameterized linear-optical circuits and their composed unitaries.

A circuit is an ordered list of phase shifters and beam splitters, each
carrying a parameter binding: a trainable slot in one of two blocks, a
data feature index, or a fixed value. Composition realizes

    U(theta, x) = W2(theta2) . S(x) . W1(theta1)

where element order is left-to-right optical propagation, so later
elements multiply on the left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence, Union

import numpy as np

from .exceptions import BindingError, ConfigurationError, InvalidDimensionError

__all__ = [
    "Trainable",
    "DataBound",
    "Fixed",
    "PhaseShifter",
    "BeamSplitter",
    "CircuitSpec",
    "element_matrix",
    "build_unitary",
    "default_ansatz",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Trainable:
    """Binding to a trainable phase: block 1 precedes the data layer, block 2 follows."""

    block: int
    slot: int

    def __post_init__(self) -> None:
        if self.block not in (1, 2):
            raise ConfigurationError(f"trainable block must be 1 or 2, got {self.block}")
        if self.slot < 0:
            raise ConfigurationError(f"trainable slot must be >= 0, got {self.slot}")


@dataclass(frozen=True)
class DataBound:
    """Binding to an input-feature component; the phase is the raw feature value."""

    feature: int

    def __post_init__(self) -> None:
        if self.feature < 0:
            raise ConfigurationError(f"feature index must be >= 0, got {self.feature}")


@dataclass(frozen=True)
class Fixed:
    """Constant phase in radians."""

    value: float


Binding = Union[Trainable, DataBound, Fixed]


@dataclass(frozen=True)
class PhaseShifter:
    """Single-mode phase e^{i phi} on ``mode``."""

    mode: int
    phase: Binding


@dataclass(frozen=True)
class BeamSplitter:
    """Two-mode coupler on adjacent modes (j, j+1).

    Convention: [[cos t, i sin t], [i sin t, cos t]] in the (j, j+1) block.
    """

    modes: tuple[int, int]
    angle: Binding

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", (int(self.modes[0]), int(self.modes[1])))


CircuitElement = Union[PhaseShifter, BeamSplitter]


def _element_binding(element: CircuitElement) -> Binding:
    return element.phase if isinstance(element, PhaseShifter) else element.angle


@dataclass(frozen=True)
class CircuitSpec:
    """Immutable circuit description.

    Invariants enforced at construction:
      - mode indices within [0, mode_count); beam splitters on adjacent pairs only
      - data feature indices within [0, feature_dim)
      - block-1 trainables precede all data elements, which precede all
        block-2 trainables (fixed elements may sit anywhere)
      - each trainable slot in [0, count) for its block is bound exactly once
    """

    mode_count: int
    elements: tuple[CircuitElement, ...]
    feature_dim: int
    trainable_counts: tuple[int, int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.mode_count < 1:
            raise ConfigurationError(f"mode_count must be >= 1, got {self.mode_count}")
        if self.feature_dim < 0:
            raise ConfigurationError(f"feature_dim must be >= 0, got {self.feature_dim}")

        slots: dict[int, list[int]] = {1: [], 2: []}
        stage = 1  # 1: block-1 region, 2: data region, 3: block-2 region
        for el in self.elements:
            self._check_modes(el)
            binding = _element_binding(el)
            if isinstance(binding, Trainable):
                if binding.block == 1 and stage > 1:
                    raise ConfigurationError(
                        "block-1 trainable element appears after the data layer"
                    )
                if binding.block == 2:
                    stage = 3
                slots[binding.block].append(binding.slot)
            elif isinstance(binding, DataBound):
                if stage == 3:
                    raise ConfigurationError(
                        "data-bound element appears after a block-2 trainable"
                    )
                stage = 2
                if binding.feature >= self.feature_dim:
                    raise ConfigurationError(
                        f"data binding to feature {binding.feature} but feature_dim "
                        f"is {self.feature_dim}"
                    )

        counts = (len(slots[1]), len(slots[2]))
        if self.trainable_counts is None:
            object.__setattr__(self, "trainable_counts", counts)
        elif tuple(self.trainable_counts) != counts:
            raise ConfigurationError(
                f"declared trainable_counts {tuple(self.trainable_counts)} do not "
                f"match elements {counts}"
            )
        for block in (1, 2):
            bound = sorted(slots[block])
            if bound != list(range(len(bound))):
                raise ConfigurationError(
                    f"block-{block} trainable slots {bound} are not 0..{len(bound) - 1} "
                    "bound exactly once"
                )

    def _check_modes(self, el: CircuitElement) -> None:
        m = self.mode_count
        if isinstance(el, PhaseShifter):
            if not 0 <= el.mode < m:
                raise ConfigurationError(f"phase shifter mode {el.mode} out of [0, {m})")
        else:
            j, jj = el.modes
            if not (0 <= j < m and 0 <= jj < m):
                raise ConfigurationError(f"beam splitter modes {el.modes} out of [0, {m})")
            if jj != j + 1:
                raise ConfigurationError(
                    f"beam splitter must act on adjacent modes (j, j+1), got {el.modes}"
                )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready description; schema documented in the README."""
        elements = []
        for el in self.elements:
            binding = _element_binding(el)
            if isinstance(binding, Trainable):
                b: dict[str, Any] = {"type": "trainable", "block": binding.block, "slot": binding.slot}
            elif isinstance(binding, DataBound):
                b = {"type": "data", "feature": binding.feature}
            else:
                b = {"type": "fixed", "value": binding.value}
            if isinstance(el, PhaseShifter):
                elements.append({"kind": "phase_shifter", "mode": el.mode, "binding": b})
            else:
                elements.append({"kind": "beam_splitter", "modes": list(el.modes), "binding": b})
        return {
            "schema_version": SCHEMA_VERSION,
            "mode_count": self.mode_count,
            "feature_dim": self.feature_dim,
            "trainable_counts": list(self.trainable_counts),
            "elements": elements,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "CircuitSpec":
        try:
            version = doc.get("schema_version", SCHEMA_VERSION)
            if version != SCHEMA_VERSION:
                raise ConfigurationError(f"unsupported circuit schema version {version}")
            elements: list[CircuitElement] = []
            for entry in doc["elements"]:
                b = entry["binding"]
                binding: Binding
                if b["type"] == "trainable":
                    binding = Trainable(block=int(b["block"]), slot=int(b["slot"]))
                elif b["type"] == "data":
                    binding = DataBound(feature=int(b["feature"]))
                elif b["type"] == "fixed":
                    binding = Fixed(value=float(b["value"]))
                else:
                    raise ConfigurationError(f"unknown binding type {b['type']!r}")
                if entry["kind"] == "phase_shifter":
                    elements.append(PhaseShifter(mode=int(entry["mode"]), phase=binding))
                elif entry["kind"] == "beam_splitter":
                    j, jj = entry["modes"]
                    elements.append(BeamSplitter(modes=(int(j), int(jj)), angle=binding))
                else:
                    raise ConfigurationError(f"unknown element kind {entry['kind']!r}")
            return cls(
                mode_count=int(doc["mode_count"]),
                elements=tuple(elements),
                feature_dim=int(doc["feature_dim"]),
                trainable_counts=tuple(doc["trainable_counts"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed circuit document: {exc}") from exc


def _resolve(
    binding: Binding,
    theta1: np.ndarray,
    theta2: np.ndarray,
    x: np.ndarray,
) -> float:
    if isinstance(binding, Fixed):
        return float(binding.value)
    if isinstance(binding, Trainable):
        vec = theta1 if binding.block == 1 else theta2
        if binding.slot >= len(vec):
            raise BindingError(
                f"trainable slot {binding.slot} out of range for block {binding.block} "
                f"of size {len(vec)}"
            )
        return float(vec[binding.slot])
    if binding.feature >= len(x):
        raise BindingError(
            f"data feature {binding.feature} out of range for input of size {len(x)}"
        )
    return float(x[binding.feature])


def element_matrix(
    element: CircuitElement,
    mode_count: int,
    theta1: Sequence[float] = (),
    theta2: Sequence[float] = (),
    x: Sequence[float] = (),
) -> np.ndarray:
    """m x m unitary of a single circuit element with bindings resolved.

    Raises:
        BindingError: a binding's index is out of range for the given vectors.
    """
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    xv = np.asarray(x, dtype=float)
    value = _resolve(_element_binding(element), t1, t2, xv)
    mat = np.eye(mode_count, dtype=complex)
    if isinstance(element, PhaseShifter):
        mat[element.mode, element.mode] = np.exp(1j * value)
    else:
        j, jj = element.modes
        c, s = np.cos(value), np.sin(value)
        mat[j, j] = c
        mat[jj, jj] = c
        mat[j, jj] = 1j * s
        mat[jj, j] = 1j * s
    return mat


def build_unitary(
    spec: CircuitSpec,
    theta1: Sequence[float],
    theta2: Sequence[float],
    x: Sequence[float],
) -> np.ndarray:
    """Compose the full circuit unitary; later elements multiply on the left.

    Args:
        spec: validated circuit description
        theta1: block-1 trainable phases, length trainable_counts[0]
        theta2: block-2 trainable phases, length trainable_counts[1]
        x: feature vector, length feature_dim

    Raises:
        ConfigurationError: vector lengths do not match the spec.
    """
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    xv = np.asarray(x, dtype=float)
    if t1.shape != (spec.trainable_counts[0],):
        raise ConfigurationError(
            f"theta1 has shape {t1.shape}, expected ({spec.trainable_counts[0]},)"
        )
    if t2.shape != (spec.trainable_counts[1],):
        raise ConfigurationError(
            f"theta2 has shape {t2.shape}, expected ({spec.trainable_counts[1]},)"
        )
    if xv.shape != (spec.feature_dim,):
        raise ConfigurationError(
            f"x has shape {xv.shape}, expected ({spec.feature_dim},)"
        )
    u = np.eye(spec.mode_count, dtype=complex)
    for el in spec.elements:
        u = element_matrix(el, spec.mode_count, t1, t2, xv) @ u
    return u


def _mesh_layout(m: int) -> list[tuple[int, int]]:
    # Rectangular mesh: m columns of adjacent-pair couplers covering all
    # m(m-1)/2 crossings, alternating offsets per column.
    pairs = []
    for column in range(m):
        for j in range(column % 2, m - 1, 2):
            pairs.append((j, j + 1))
    return pairs


def default_ansatz(
    m: int,
    k: int,
    max_trainable_per_block: int | None = None,
) -> CircuitSpec:
    """Standard two-block circuit: trainable mesh, data phases, mirrored mesh.

    Block 1 is a rectangular mesh of beam splitters on adjacent modes, each
    preceded by a trainable phase shifter on its upper mode. The data layer
    puts one phase shifter on each of the last k modes, feature j bound to
    the j-th of them. Block 2 is the mirror image of block 1 (element order
    reversed) with its own independent parameters.

    Args:
        m: mode count, >= 2
        k: feature dimension, 1 <= k <= m
        max_trainable_per_block: optional cap on trainable phases per block;
            surplus bindings become fixed zeros (hardware-limited layouts)

    Raises:
        ConfigurationError: m < 2, k < 1, or k > m.
    """
    if m < 2:
        raise ConfigurationError(f"need at least 2 modes, got {m}")
    if not 1 <= k <= m:
        raise ConfigurationError(f"feature_dim must be in [1, {m}], got {k}")
    if max_trainable_per_block is not None and max_trainable_per_block < 0:
        raise ConfigurationError("max_trainable_per_block must be >= 0")

    def bind(block: int, counter: list[int]) -> Binding:
        slot = counter[0]
        counter[0] += 1
        if max_trainable_per_block is not None and slot >= max_trainable_per_block:
            return Fixed(0.0)
        return Trainable(block=block, slot=slot)

    pairs = _mesh_layout(m)

    block1: list[CircuitElement] = []
    c1 = [0]
    for j, jj in pairs:
        block1.append(PhaseShifter(mode=j, phase=bind(1, c1)))
        block1.append(BeamSplitter(modes=(j, jj), angle=bind(1, c1)))

    data: list[CircuitElement] = [
        PhaseShifter(mode=m - k + feature, phase=DataBound(feature=feature))
        for feature in range(k)
    ]

    block2: list[CircuitElement] = []
    c2 = [0]
    for j, jj in reversed(pairs):
        block2.append(BeamSplitter(modes=(j, jj), angle=bind(2, c2)))
        block2.append(PhaseShifter(mode=j, phase=bind(2, c2)))

    return CircuitSpec(
        mode_count=m,
        elements=tuple(block1 + data + block2),
        feature_dim=k,
    )
