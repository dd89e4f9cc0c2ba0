"""Exception types. The CLI maps them onto exit codes."""


class ArplanError(Exception):
    exit_code = 1


class DataError(ArplanError, ValueError):
    """Invalid input data (bad rows, unknown ids, violated invariants)."""

    exit_code = 2


class LimitError(ArplanError):
    """A configured size or work limit would be exceeded."""

    exit_code = 3
