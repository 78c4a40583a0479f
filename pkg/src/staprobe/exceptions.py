"""Exception hierarchy shared across the package.

Two failure classes are kept distinct because they map to different CLI
exit codes: bad inputs are the caller's problem, quality failures mean a
computation ran but did not meet its accuracy contract.
"""


class StaprobeError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(StaprobeError):
    """An input violated a structural precondition (shape, hermiticity, range)."""


class QualityError(StaprobeError):
    """A numerical result failed an internal accuracy or consistency check."""
