"""Exception hierarchy shared by every netres module."""


class NetresError(Exception):
    """Base class for all errors raised by netres."""


class GraphFormatError(NetresError, ValueError):
    """An edge-list document could not be parsed or failed validation."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ModelAssumptionError(NetresError, ValueError):
    """The graph violates a modelling assumption (strong connectivity, symmetrizability).

    ``violations`` lists offending ordered node pairs when they are known.
    """

    def __init__(self, message: str, violations: list[tuple[int, int]] | None = None):
        self.violations = list(violations or [])
        super().__init__(message)


class DivergenceError(NetresError, ArithmeticError):
    """A closed-form quantity is infinite, e.g. undamped driving exactly at an eigenfrequency."""


class NumericalError(NetresError, ArithmeticError):
    """A numerical routine failed: eigensolver non-convergence or simulation blow-up."""
