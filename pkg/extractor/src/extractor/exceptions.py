"""Error hierarchy for the feature extractor.

Validation problems (bad configs, malformed files, mismatched shapes)
derive from ValueError so callers can treat them uniformly; the CLI maps
them to exit code 2 and everything else to 1.
"""


class ExtractorError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(ExtractorError, ValueError):
    """Invalid architecture or training settings."""


class DataError(ExtractorError, ValueError):
    """Malformed CSV or weight file; messages carry path and line number."""


class TrainingError(ExtractorError, ValueError):
    """Dataset unsuitable for training (single class, shape mismatch)."""


class ExportError(ExtractorError, ValueError):
    """Latent export failed (wrong model shape or missing latent layer)."""
