"""Exception types raised across the package."""


class RangeError(ArithmeticError):
    """A value falls outside the representable Q32.32 range."""


class DivByZeroError(ZeroDivisionError):
    pass


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class DegenerateDataError(ValueError):
    """Input sample has (numerically) zero variance."""


class ConvergenceError(RuntimeError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInputError(ValueError):
    """Fewer than two observations were supplied."""
