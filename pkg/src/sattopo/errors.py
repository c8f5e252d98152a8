"""Exception hierarchy shared across the package."""


class SatTopoError(Exception):
    """Base class for all sattopo errors."""


class ValidationError(SatTopoError):
    """Invalid user input: bad spec fields, mismatched shapes, bad config."""


class GeometryError(SatTopoError):
    """Degenerate geometry: coincident bodies, body at Earth's center, etc."""


class ConvergenceError(SatTopoError):
    """An iterative method hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class SolverError(SatTopoError):
    """The LP backend failed (should be unreachable on this bounded polytope)."""
