"""
Exception hierarchy for the feature-leveling toolkit.

Every error raised on purpose derives from FeatureLevelingError and from the
closest builtin, so callers can catch either. The CLI maps these classes to
exit codes in one place (see app.py).
"""

from typing import Tuple


class FeatureLevelingError(Exception):
    """Base class for all expected errors."""


# Numerics

class ShapeError(FeatureLevelingError, ValueError):
    """Operand shapes do not conform."""

    @classmethod
    def mismatch(cls, op: str, a: Tuple[int, ...], b: Tuple[int, ...]) -> "ShapeError":
        return cls(f"{op}: shape mismatch between {a} and {b}")


class NumericError(FeatureLevelingError, ArithmeticError):
    """A non-finite value reached a public operation."""


class TargetRangeError(FeatureLevelingError, ValueError):
    """A target label lies outside the range the loss accepts."""


class ArgumentError(FeatureLevelingError, ValueError):
    """An argument is outside its documented domain."""


# Data

class DataParseError(FeatureLevelingError, ValueError):
    """A dataset file could not be parsed."""


class IdxFormatError(DataParseError):
    """An IDX file has the wrong magic number or header."""


class TruncatedPayloadError(DataParseError):
    """A file ended before its declared payload."""


class CountMismatchError(DataParseError):
    """Image and label files disagree on the number of items."""


class RecordSizeError(DataParseError):
    """A binary batch is not a whole number of records."""


class CsvFieldError(DataParseError):
    """A CSV field is non-numeric or an unknown category."""

    def __init__(self, message: str, row: int) -> None:
        super().__init__(f"row {row}: {message}")
        self.row = row


class DatasetNotFoundError(FeatureLevelingError, FileNotFoundError):
    """A dataset path does not exist."""

    def __init__(self, path: str) -> None:
        super().__init__(f"dataset file not found: {path}")
        self.path = path


# Checkpoints

class CheckpointNotFoundError(FeatureLevelingError, FileNotFoundError):
    """A checkpoint path does not exist."""

    def __init__(self, path: str) -> None:
        super().__init__(f"checkpoint not found: {path}")
        self.path = path


class CheckpointParseError(FeatureLevelingError, ValueError):
    """A checkpoint is not valid JSON or misses required keys."""


class SchemaVersionError(FeatureLevelingError, ValueError):
    """A checkpoint was written with an unsupported schema version."""


class CheckpointValidationError(FeatureLevelingError, ValueError):
    """A checkpoint's dimensions are inconsistent."""


# Training, metrics, CLI

class TrainingDivergedError(FeatureLevelingError, RuntimeError):
    """The objective became non-finite during training."""

    def __init__(self, iteration: int, value: float) -> None:
        super().__init__(f"training diverged at iteration {iteration}: objective={value}")
        self.iteration = iteration
        self.value = value


class UndefinedMetricError(FeatureLevelingError, ValueError):
    """A metric is undefined for the given targets."""


class UsageError(FeatureLevelingError, ValueError):
    """Bad command-line usage or configuration."""
