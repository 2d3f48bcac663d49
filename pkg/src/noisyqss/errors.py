"""Exception hierarchy shared across the package."""


class QssError(Exception):
    """Base class for all errors raised by noisyqss."""


class ShapeError(QssError, ValueError):
    """Matrix dimensions do not match the declared register."""


class SizeError(QssError, ValueError):
    """Result would exceed the supported register size."""


class DomainError(QssError, ValueError):
    """A parameter lies outside its allowed range."""


class ContractError(QssError, ValueError):
    """An operator violates a structural requirement (unitarity, completeness)."""


class DegenerateStateError(QssError, ArithmeticError):
    """Post-measurement normalisation would divide by (almost) zero."""


class CatalogueError(QssError, KeyError):
    """Unknown channel name."""
