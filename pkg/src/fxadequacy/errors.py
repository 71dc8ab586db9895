"""Exception hierarchy.

Every error carries an ``exit_code`` class used by the command line front end:
2 for bad input data, 3 for bad model specifications, 4 for numerical
failures (singular or degenerate systems).
"""

from __future__ import annotations


class AdequacyError(Exception):
    exit_code = 5
    category = "internal"


class InputError(AdequacyError, ValueError):
    exit_code = 2
    category = "input"


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataValueError(InputError):
    """A cell that cannot be read as a finite number."""


class IntegrityError(InputError):
    """Duplicate or unordered periods, too few rows."""


class AlignmentError(InputError):
    """Series whose period axes do not line up."""


class DomainError(InputError):
    """Value outside the domain of a transform (e.g. log of a non-positive number)."""


class SchemaError(InputError):
    """A report file that does not have the expected layout."""


class SpecError(AdequacyError, ValueError):
    exit_code = 3
    category = "spec"


class ShapeError(SpecError):
    pass


class NumericalError(AdequacyError, ArithmeticError):
    exit_code = 4
    category = "numerical"


class SingularityError(NumericalError):
    def __init__(self, message: str, columns: list[str] | None = None):
        self.columns = list(columns or [])
        super().__init__(message)


class DegenerateError(NumericalError):
    pass
