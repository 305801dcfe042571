"""Exception types shared across the package.

The CLI maps these onto its exit codes: input problems exit 2, numeric
failures exit 3 (a falsified domination check exits 1 but is a finding,
not an exception).
"""


class InputError(ValueError):
    """Invalid argument: out-of-range parameter, dimension mismatch, bad spec."""


class UnsupportedSpaceError(InputError):
    """Operation requires a space the given one is not (e.g. smoothness order 2)."""


class CapabilityError(InputError):
    """Model lacks the analytic structure an operation needs."""


class InsufficientDataError(InputError):
    """Too few usable data points for a fit."""


class NumericError(RuntimeError):
    """A numeric routine failed to reach its tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved
