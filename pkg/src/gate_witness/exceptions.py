"""Exception hierarchy shared by every module."""


class GateWitnessError(Exception):
    """Base class for all package errors."""


class DimensionError(GateWitnessError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class PreconditionError(GateWitnessError, ValueError):
    """An input violates a documented precondition (unitarity, Hermiticity, range...)."""


class ClassificationError(GateWitnessError, ValueError):
    """The image of a product basis fits none of the characteristic operation classes."""


class ComplementarityError(PreconditionError):
    """Two input bases are not mutually unbiased."""


class InvariantError(GateWitnessError, RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
