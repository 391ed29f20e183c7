"""Exception hierarchy shared by all qthermo modules."""


class QThermoError(Exception):
    """Base class for library errors."""


class DomainError(QThermoError, ValueError):
    """An argument lies outside the physical domain of an operation."""


class DimensionError(QThermoError, ValueError):
    """Operands have incompatible shapes."""


class AccuracyError(QThermoError, ArithmeticError):
    """A numerical tolerance check failed (coarse mesh, trace drift, ...)."""


class DegeneracyError(QThermoError, ArithmeticError):
    """A generator is singular where it must be invertible."""


class CycleConstructionError(QThermoError, ValueError):
    """Stroke endpoints do not close into a valid thermodynamic cycle."""
