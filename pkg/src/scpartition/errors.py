"""Exception types shared across the package."""


class NumericsError(Exception):
    """Base class for numerical failures raised by this package."""


class DegenerateCriticalPoint(NumericsError):
    """A critical point of V has vanishing curvature within tolerance."""


class ToleranceNotReached(NumericsError):
    """Adaptive quadrature exhausted its subdivision budget."""


class NonIntegrable(NumericsError):
    """Integrand diverges too strongly at the singular endpoint."""


class NoSignChange(NumericsError):
    """Root bracket does not straddle a sign change."""


class InvalidBracket(NumericsError):
    """Turning-point data violates the positivity condition on V(x) - E."""


class SingularTurningPoint(NumericsError):
    """V'(x_turn) vanishes within tolerance, so the flight time diverges."""


class UnavailableDeterminant(NumericsError):
    """No fluctuation-determinant formula for multi-period trajectories."""


class ConvergenceFailure(NumericsError):
    """A solver failed to locate a root it is guaranteed to have."""


class GridTooNarrow(NumericsError):
    """Eigenfunctions do not decay at the diagonalization grid boundary."""


class TailNotNegligible(NumericsError):
    """Spectral sum truncation error exceeds the requested bound."""


class CutoffTooSmall(NumericsError):
    """The x0 integration cutoff does not suppress the integrand."""


# Short alias used in a few call sites.
Unavailable = UnavailableDeterminant
