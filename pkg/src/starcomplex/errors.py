"""Exception types shared across the package."""


class StarComplexError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(StarComplexError, ValueError):
    """Operands live over different coordinate dimensions."""


class TruncationMismatch(StarComplexError, ValueError):
    """Operands carry different hbar truncation orders."""


class SingularMatrix(StarComplexError, ValueError):
    """An affine map (or linear system pivot) is not invertible."""


class GradingViolation(StarComplexError, ValueError):
    """A symbol level has xi-degree exceeding its hbar order."""


class NotInvertible(StarComplexError, ValueError):
    """A symbol has no inverse in the truncated algebra."""


class GroupAxiomError(StarComplexError, ValueError):
    """A multiplication table fails a group axiom.

    Carries the violated axiom name and a witness tuple of element labels.
    """

    def __init__(self, axiom, witness, message):
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness


class ContextMismatch(StarComplexError, ValueError):
    """Cochain operands disagree on group, action, dimension or order."""


class Obstruction(StarComplexError):
    """An order-by-order linear solve hit a non-exact cocycle.

    The certificate records the offending right-hand side, the window it
    was solved in, and the rank data, so the failure can be audited
    independently of this package.
    """

    def __init__(self, certificate):
        super().__init__(f"obstruction in window {certificate.get('window')}")
        self.certificate = certificate


class ValidationError(StarComplexError, ValueError):
    """A file or scenario failed schema or domain validation."""

    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
