"""Exception types shared across the package."""


class GlvortexError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GlvortexError, ValueError):
    """A generation/solver parameter violates its documented constraints."""


class MeshError(GlvortexError, ValueError):
    """A mesh violates a structural invariant."""


class MeshFormatError(MeshError):
    """A mesh file could not be parsed; message carries the line number."""


class RefinementError(GlvortexError, RuntimeError):
    """Conformity closure did not terminate within its sweep budget."""


class SolverError(GlvortexError, RuntimeError):
    """A linear solve failed to reach its residual contract."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class CompatibilityError(SolverError):
    """Right side of a pure-Neumann system has a constant component."""


class FieldUnavailableError(GlvortexError, LookupError):
    """A derived field was requested from a state that does not carry it."""


class EvaluationError(GlvortexError, ValueError):
    """A point lies outside the source mesh beyond tolerance."""


class ConfigError(GlvortexError, ValueError):
    """A run configuration file is malformed or violates an invariant."""
