"""Exception types raised across the package.

Everything derives from ``PolyphotonError`` so callers can catch broadly;
most errors are also ``ValueError`` subclasses because they signal bad
inputs rather than internal failures.
"""


class PolyphotonError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(PolyphotonError, ValueError):
    """A matrix, vector, or mode count has the wrong shape."""


class NotInBasisError(PolyphotonError, ValueError):
    """A Fock state does not belong to the basis it was looked up in."""


class BindingError(PolyphotonError, ValueError):
    """A circuit-element parameter binding cannot be resolved."""


class ConfigurationError(PolyphotonError, ValueError):
    """Inconsistent circuit, model, or run configuration."""


class InvalidTransitionError(PolyphotonError, ValueError):
    """Input and output Fock states are incompatible (photon number or modes)."""


class UnsupportedInputError(PolyphotonError, ValueError):
    """The operation does not support this input (e.g. bunched noisy input)."""


class InvalidDatasetError(PolyphotonError, ValueError):
    """A dataset violates a training precondition (empty, single-class, bad labels)."""


class InvalidHistoryError(PolyphotonError, ValueError):
    """Observation history passed to the optimizer is inconsistent."""


class OptimizationError(PolyphotonError, RuntimeError):
    """An optimizer failed (diverged, singular system, inconsistent history)."""


class TokenizationError(PolyphotonError, ValueError):
    """A SMILES string cannot be encoded with the given dictionary."""


class UnknownTokenError(TokenizationError):
    """A character is missing from the token dictionary."""


class OverlongSmilesError(TokenizationError):
    """A SMILES string exceeds the fixed encoding length."""


class GapRangeError(PolyphotonError, ValueError):
    """A gap energy lies outside the classified range."""


class SplitError(PolyphotonError, ValueError):
    """Stratified splitting or balanced subsampling cannot be satisfied."""


class CsvFormatError(PolyphotonError, ValueError):
    """A CSV file does not match the documented schema."""


class PipelineStageError(PolyphotonError, RuntimeError):
    """An experiment stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
