"""Exception hierarchy shared by the workbench modules and the CLI."""

from typing import Optional


class BPSWorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class GridError(BPSWorkbenchError):
    """Grid extents, cell counts or array shapes are inconsistent."""


class DomainError(BPSWorkbenchError):
    """A value lies outside the domain an operation is defined on."""


class UnknownFamilyError(BPSWorkbenchError):
    """The requested G1 family label is not registered."""


class SnapshotFormatError(BPSWorkbenchError):
    """A snapshot or profile file could not be parsed.

    Args:
        message (str): What went wrong.
        line_number (Optional[int]): 1-based line of the offending input.
    """

    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class PathError(BPSWorkbenchError):
    """A path flag names an S3 location without a bucket or key."""


class SingularityError(BPSWorkbenchError):
    """The gauge profile reached 1 + a <= 0 (or the configured threshold)."""


class IntegrationError(BPSWorkbenchError):
    """The radial integrator failed for a reason other than an event."""


class NonFiniteEnergyError(BPSWorkbenchError):
    """A non-finite energy showed up during gradient flow."""
