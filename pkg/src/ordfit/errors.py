"""Exception types shared across the package."""


class OrdfitError(Exception):
    """Base class for all errors raised by ordfit."""


class ConfigError(OrdfitError):
    """Invalid configuration (bad flag value, malformed config file, bad grid)."""


class DataError(OrdfitError):
    """Invalid input data.

    Carries an optional (row, column) location of the first offending cell
    so the CLI can report it; row numbers are 1-based and count the header.
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        if row is not None or column is not None:
            message = f"{message} (row={row}, column={column})"
        super().__init__(message)


class DimensionError(OrdfitError):
    """Parameter/data dimension mismatch, naming the offending block."""

    def __init__(self, message, group=None):
        self.group = group
        if group is not None:
            message = f"{message} (group={group})"
        super().__init__(message)


class SeparationError(OrdfitError):
    """MLE does not exist / quasi-separation: unpenalized fit diverged."""
