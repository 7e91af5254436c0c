"""Exception hierarchy shared by every rsuplan module.

Each error carries the process exit status the command-line interface reports
for it, so library callers and the CLI agree on how failures are classified.
"""

from __future__ import annotations

from typing import Optional

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RESOURCE = 4
EXIT_INVARIANT = 5


class RsuPlanError(Exception):
    """Base class for all rsuplan failures."""

    exit_code: int = EXIT_INVARIANT


class ParameterError(RsuPlanError, ValueError):
    """A numeric or categorical parameter is outside its documented range."""

    exit_code = EXIT_USAGE


class ParseError(RsuPlanError):
    """Malformed input file. ``line`` is 1-based when known."""

    exit_code = EXIT_PARSE

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class TrajectoryParseError(ParseError):
    """A trajectory file could not be read."""


class MapParseError(ParseError):
    """A road map file could not be read."""


class DistanceMatrixError(ParseError):
    """A distance matrix is malformed or does not match its junction set."""


class PlanFileError(ParseError):
    """A placement plan file could not be read."""


class ResourceBoundExceeded(RsuPlanError):
    """An exponential enumeration went past its configured cap or time budget."""

    exit_code = EXIT_RESOURCE


class UnknownJunctionError(RsuPlanError, KeyError):
    """A junction id is referenced that the map or matrix does not define."""

    exit_code = EXIT_INVARIANT

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class EmptyPatternSetError(RsuPlanError):
    """A pipeline produced no patterns to cover."""

    exit_code = EXIT_INVARIANT


class InvariantViolation(RsuPlanError):
    """A result failed a consistency check, such as a cover that misses a pattern."""

    exit_code = EXIT_INVARIANT
