"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class LogSurfaceError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LogSurfaceError, ValueError):
    """An operation was called outside of its mathematical domain."""


class StageError(DomainError):
    """A pipeline stage rejected its input; ``stage`` names the stage."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class ResourceError(LogSurfaceError):
    """A configured budget (depth, step count, table size) was exceeded."""


class ParseError(LogSurfaceError):
    """A document could not be parsed; ``path`` is the offending field path."""

    def __init__(self, message: str, path: str = "$", line: int | None = None) -> None:
        where = path if line is None else f"{path} (line {line})"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class VersionError(ParseError):
    """The document declares a schema_version this package does not read."""


class VerificationError(LogSurfaceError):
    """A certificate or report failed replay."""

    def __init__(self, mismatches: list[str]) -> None:
        super().__init__("; ".join(mismatches) if mismatches else "verification failed")
        self.mismatches = mismatches
