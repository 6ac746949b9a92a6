"""Exception hierarchy shared by all computational modules.

Every error carries the name of the module that raised it and, when it
makes sense, the offending input field, so the CLI can surface a
structured error record without string parsing.
"""

from __future__ import annotations


class TwistSheafError(Exception):
    """Base class. ``module`` and ``field`` feed the CLI error record."""

    module = "twistsheaf"

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.field = field

    @property
    def kind(self) -> str:
        return type(self).__name__


class DimensionMismatch(TwistSheafError):
    module = "exact"


class NotNilpotent(TwistSheafError):
    module = "weights"


class NonCommuting(TwistSheafError):
    module = "weights"

    def __init__(self, message: str, pair: tuple[int, int], *, field: str | None = None):
        super().__init__(message, field=field)
        self.pair = pair


class InvalidMonodromy(TwistSheafError):
    module = "prolongation"


class InvalidHodgeData(TwistSheafError):
    module = "ssheaf"


class StraddlingSelector(TwistSheafError):
    module = "ssheaf"


class ZeroSection(TwistSheafError):
    module = "l2"


class IndexMismatch(TwistSheafError):
    module = "l2"


class Indeterminate(TwistSheafError):
    module = "l2"


class PointOnBoundary(TwistSheafError):
    module = "cks"


class StepTooLarge(TwistSheafError):
    module = "cks"


class UnknownModel(TwistSheafError):
    module = "cks"


class UnsupportedGerm(TwistSheafError):
    module = "resolution"


class InvalidCenter(TwistSheafError):
    module = "resolution"


class NotResolved(TwistSheafError):
    module = "resolution"


class SchemaError(TwistSheafError):
    module = "cli"
