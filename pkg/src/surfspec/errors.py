"""Exception types shared across the package."""


class SurfspecError(Exception):
    """Base class for all package errors."""


class MeshValidationError(SurfspecError):
    """Raised when a surface mesh violates a structural invariant."""


class CapacityError(SurfspecError):
    """Raised when a requested refinement level exceeds the memory guard."""


class SingularEvaluationError(SurfspecError):
    """Raised when a kernel is evaluated at coincident points."""


class UnsupportedOperationError(SurfspecError):
    """Raised for operations that do not apply to the given mesh (e.g. double layer on open screens)."""


class QuadratureError(SurfspecError):
    """Raised when a quadrature rule cannot be built or an integrand is non-finite."""


class SingularMatrixError(SurfspecError):
    """Raised by the direct solver on a numerically singular matrix."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class NumericError(SurfspecError):
    """Raised when a dense factorization or eigensolver fails to converge."""


class ContourError(SurfspecError):
    """Raised when a contour node hits (or nearly hits) an eigenvalue."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class RootNotFoundError(SurfspecError):
    """Raised when a bracketed root search finds no sign change."""
