"""Exception types shared across the package.

Exit-code mapping used by the CLI: ConfigurationError -> 2, everything
else numeric/capacity -> 3.
"""


class CavqedError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CavqedError):
    """Invalid or inconsistent run configuration / input data."""


class InvalidGridError(ConfigurationError):
    """Spatial grid violates a precondition (e.g. even FGH point count)."""


class InvalidPotentialError(ConfigurationError):
    """Potential samples are not finite on the grid."""


class DegeneracyError(CavqedError):
    """Lowest atomic pair is degenerate below tolerance."""


class DegenerateInputError(CavqedError):
    """Chain-map input couplings vanish (rho = 0)."""


class CapacityError(CavqedError):
    """Requested matrix would exceed the configured size guard."""


class NumericError(CavqedError):
    """Solver failure; carries a residual norm when available."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
