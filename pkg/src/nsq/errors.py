"""Exception hierarchy shared by every layer of the workbench."""

from __future__ import annotations


class NsqError(Exception):
    """Base class for all workbench errors."""


# --- algebra ---


class ParseError(NsqError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, position: int = 0) -> None:
        super().__init__(f"Unknown identifier {name!r}", position)
        self.name = name


class ZeroDenominatorError(NsqError):
    """A denominator is the zero polynomial."""


class SingularPointError(NsqError):
    def __init__(self, denominator: object, point: object) -> None:
        super().__init__(f"Denominator {denominator} vanishes at {point}")
        self.denominator = denominator
        self.point = point


class InconclusiveZeroTestError(NsqError):
    """Sampling could not decide whether an expression vanishes."""


# --- variational ---


class SingularHessianError(NsqError):
    def __init__(self, determinant: object) -> None:
        super().__init__(f"Velocity Hessian is singular (determinant {determinant})")
        self.determinant = determinant


class DegenerateLagrangianError(NsqError):
    """Lagrangian outside the supported class (velocity degree > 2)."""


class ConservationError(NsqError):
    """A constructed first integral is not conserved."""


# --- quantize ---


class TransformError(NsqError):
    """A point transformation cannot be applied."""


# --- dynamics ---


class CollisionError(NsqError):
    def __init__(self, message: str, trajectory: object = None) -> None:
        super().__init__(message)
        self.trajectory = trajectory


class BranchError(NsqError):
    """The algebraic equation has complex roots (particles have collided)."""


class TrackingError(NsqError):
    """Roots could not be matched to particles unambiguously."""


# --- io ---


class SchemaError(NsqError):
    """A JSON document does not match its schema."""


class UsageError(NsqError):
    """Invalid combination of command arguments."""
