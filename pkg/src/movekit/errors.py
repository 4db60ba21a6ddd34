"""Exception types shared across the toolkit."""


class MovekitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(MovekitError):
    """Malformed input that could not be read at all (JSON, bib, tabular)."""


class ValidationError(MovekitError):
    """Structurally readable input that violates a data-model invariant."""


class AlignmentError(MovekitError):
    """Spans and sentence segmentation disagree about the text."""


class ConfigError(MovekitError):
    """Invalid or inconsistent configuration."""


class EmptyResultError(MovekitError):
    """An ingestion step produced zero usable records."""


class TrainingError(MovekitError):
    """Model training failed (diverged or was given unusable data)."""


class VersionConflict(MovekitError):
    """Optimistic-concurrency check failed; caller must refetch."""
