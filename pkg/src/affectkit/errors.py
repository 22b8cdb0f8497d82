"""Exception hierarchy shared by every module.

The CLI maps each class to a one-word error category, so new error types
should subclass one of these rather than raising bare ``ValueError``.
"""


class AffectError(Exception):
    category = "error"


class FormatError(AffectError, ValueError):
    """A file does not follow its documented grammar."""

    category = "format"

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class RangeError(AffectError, ValueError):
    category = "range"


class ModelFormatError(AffectError, ValueError):
    category = "model"


class NumericalError(AffectError, ArithmeticError):
    category = "numerical"


class ConvergenceError(NumericalError):
    category = "convergence"

    def __init__(self, message, violation=None):
        self.violation = violation
        super().__init__(message)


class DivergenceError(NumericalError):
    category = "divergence"

    def __init__(self, message, iteration=None):
        self.iteration = iteration
        super().__init__(message)


class UndefinedCorrelationError(AffectError, ValueError):
    category = "undefined-correlation"


class MissingIdError(AffectError, KeyError):
    category = "missing-id"

    def __str__(self):
        return str(self.args[0]) if self.args else "missing id"
