"""
Exception hierarchy shared by every module of the package.

The command line maps these kinds onto exit codes, see :mod:`cubeabs.cli`.
"""

from __future__ import annotations

from typing import Any, Optional


class CubeAbsError(Exception):
    """Base class of all package errors."""


class ArgumentError(CubeAbsError, ValueError):
    """Unknown cube id, bad face index, unknown name or malformed argument."""


class PreconditionError(CubeAbsError, ValueError):
    """An operation was called outside its documented precondition."""


class ResourceError(CubeAbsError, RuntimeError):
    """A configured enumeration budget was exceeded.

    Partial results are never returned alongside this error.
    """

    def __init__(
        self,
        message: str,
        budget: Optional[str] = None,
        limit: Optional[int] = None,
    ):
        super().__init__(message)
        self.budget = budget
        self.limit = limit


class RefusalError(CubeAbsError):
    """A collapse or merge was requested but its checks do not pass."""

    def __init__(self, message: str, judgment: Any = None):
        super().__init__(message)
        self.judgment = judgment


class CertificationError(CubeAbsError):
    """A certification step could not be carried out (e.g. path transport)."""


class IntegrityError(CubeAbsError):
    """A reduction report does not replay onto its input."""


class LoadError(CubeAbsError, ValueError):
    """Malformed exchange file."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(LoadError):
    """Syntax or type error in a program graph source."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        if column is not None:
            message = f"column {column}: {message}"
        super().__init__(message, line=line)
        self.column = column
