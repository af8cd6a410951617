"""Exception hierarchy shared by all modules."""


class UnitIndexError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(UnitIndexError, ValueError):
    pass


class NumericInputError(UnitIndexError, ValueError):
    pass


class AlgebraMismatchError(UnitIndexError, ValueError):
    pass


class IncompleteTableError(UnitIndexError, ValueError):
    pass


class SymmetryError(UnitIndexError, ValueError):
    """A kernel table (or derived element) violates L^{y,x}(b) = L^{x,y}(b*)*."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ReferenceLabelError(UnitIndexError, ValueError):
    pass


class UnknownLabelError(UnitIndexError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown label"


class NormalizationError(UnitIndexError, ValueError):
    """Coefficients of a box-sum do not add up to the unit."""


class PreconditionError(UnitIndexError, ValueError):
    pass


class PositivityError(UnitIndexError, ValueError):
    pass


class NotCPDError(PositivityError):
    pass
