"""Exception hierarchy shared by the symbolic and numeric layers."""


class FolcharError(Exception):
    """Base class for all errors raised by this package."""


class DeclarationError(FolcharError):
    """A symbol or generator is missing, duplicated, or ill-declared."""


class ArgumentError(FolcharError, ValueError):
    """An operation was called with arguments outside its contract."""


class RewriteError(FolcharError):
    """A rewrite system fails termination or confluence validation."""


class SolverError(FolcharError):
    """The connection-form solver found no solution in the ansatz span."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnsupportedCoefficientError(FolcharError):
    """A coefficient does not have the shape an operation requires."""


class SingularEvaluationError(FolcharError):
    """A denominator vanished (or nearly vanished) at an evaluation point."""

    def __init__(self, message, scalar_text=None):
        super().__init__(message)
        self.scalar_text = scalar_text


class ManifestError(FolcharError):
    """A manifest failed to parse or validate."""
