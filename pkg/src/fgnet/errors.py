"""Exception hierarchy.

The CLI maps these onto exit codes: configuration problems exit with 2,
bad or insufficient data with 3, resource limits with 4.
"""


class FgnError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(FgnError, ValueError):
    exit_code = 2


class DomainError(ConfigError):
    """Parameters outside the regime an operation is defined for."""


class InvalidKernelError(ConfigError):
    pass


class DataError(FgnError, ValueError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InsufficientDataError(DataError):
    pass


class NumericalError(FgnError, ArithmeticError):
    exit_code = 3


class ResourceLimitError(FgnError):
    exit_code = 4
