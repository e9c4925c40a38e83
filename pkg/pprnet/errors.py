""" Exceptions raised by pprnet.

Data and parse errors derive from ValueError, so callers which only care about
"bad input" can keep catching ValueError.
"""
from typing import Optional


class PprDataError(ValueError):
    """Base class for errors caused by the content of input data or files."""


class MontageError(PprDataError):
    """A montage transform received a recording in the wrong montage."""


class ChannelResolutionError(PprDataError):
    """A channel name could not be found in a recording."""


class InsufficientDataError(PprDataError):
    """Too few samples for the requested operation."""


class EdfParseError(PprDataError):
    def __init__(
        self, message: str, offset: Optional[int] = None, record: Optional[int] = None
    ):
        location = []
        if record is not None:
            location.append(f"record {record}")
        if offset is not None:
            location.append(f"byte offset {offset}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.offset = offset
        self.record = record


class AnnotationParseError(PprDataError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class WindowStoreError(PprDataError):
    def __init__(self, message: str, offset: Optional[int] = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class MergeError(PprDataError):
    """Two windows can not be merged into a synthetic window."""


class AugmentationError(PprDataError):
    """A training fold does not hold enough anomaly windows to augment."""


class ShapeError(PprDataError):
    """Input shape does not match what a network expects."""


class SingleClassError(PprDataError):
    """Training data must contain both labels."""


class ConfigurationError(KeyError):
    """Missing or invalid configuration, unknown layer ids or missing artifacts."""

    def __str__(self) -> str:
        # KeyError quotes its argument, which makes messages hard to read.
        return str(self.args[0]) if self.args else ""


class NumericalError(ArithmeticError):
    """Training diverged, e.g. the loss became NaN."""
