"""Exception types shared by every module; the CLI maps each to an exit code."""


class QuotientError(Exception):
    exit_code = 1


class ParseError(QuotientError, ValueError):
    exit_code = 2


class ResourceError(QuotientError, RuntimeError):
    """A configured cap (closure size, search budget) was exceeded."""

    exit_code = 3


class ConsistencyError(QuotientError, AssertionError):
    exit_code = 4
