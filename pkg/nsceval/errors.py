"""
Exceptions raised by nsceval.

Every exception carries a short machine-readable `category` which the command line
interface prints as `error: <category>: <message>`. All computation errors derive
from `ValueError` so callers that only expect bad input values keep working.
"""


class NscError(ValueError):
    """Base class of all nsceval computation errors."""

    category = "computation"


class RangeError(NscError):
    """A parameter such as an averaging factor is outside its admissible interval."""

    category = "range"


class InsufficientDataError(NscError):
    """Too few samples remain for the requested statistic."""

    category = "insufficient-data"


class ShapeError(NscError):
    """Series that must be paired differ in length or averaging factor."""

    category = "shape"


class DegenerateNivError(NscError):
    """The Allan variance of a noise independent variable vanishes."""

    category = "degenerate-niv"


class DomainError(NscError):
    """An argument is outside the mathematical domain of a formula."""

    category = "domain"


class ArgumentOrderError(NscError):
    """Two arguments were passed in an order that violates their relation."""

    category = "argument-order"


class ExtractionError(NscError):
    """No window of a K curve qualifies for a scalar estimate.

    Parameters
    ----------
    message : str
        Description of the failure
    best_window : tuple of int, optional
        Averaging factors `(m_lo, m_hi)` of the candidate closest to qualifying
    violation : float, optional
        Largest excess of a point beyond its allowed deviation from the window mean
    """

    category = "extraction-failed"

    def __init__(self, message, best_window=None, violation=None):
        super().__init__(message)
        self.best_window = best_window
        self.violation = violation


class EmptyBudgetError(NscError):
    """An uncertainty budget needs at least one entry."""

    category = "empty-budget"


class CompensationError(NscError):
    """Every asynchrony candidate was degenerate."""

    category = "compensation-failed"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnknownPresetError(NscError):
    """A scenario preset name is not known."""

    category = "unknown-preset"

    def __init__(self, name, valid_names):
        super().__init__(
            f"Unknown preset '{name}', valid names are: {', '.join(valid_names)}"
        )
        self.valid_names = tuple(valid_names)


class ConstructionError(NscError):
    """A scenario or clock description is inconsistent."""

    category = "construction"


class ParseError(NscError):
    """An input file could not be parsed.

    Parameters
    ----------
    message : str
        Description of the failure
    line : int, optional
        One-based line number in the offending file
    """

    category = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class OutputError(OSError):
    """An output file could not be written."""

    category = "io"
