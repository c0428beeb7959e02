"""Exception hierarchy.

Everything numerical raises a subclass of :class:`EulerStabError`, so the CLI
can map configuration problems to exit code 2 and numerical failures to 3.
"""


class EulerStabError(Exception):
    """Base class for all package errors."""


class ConfigError(EulerStabError):
    """Malformed, unreadable or schema-violating configuration."""


class InvalidSpec(EulerStabError):
    """Grid or domain specification outside the supported range."""


class MonotonicityViolation(EulerStabError):
    """A probe grid detected the wrong monotonicity."""


class CoercivityViolation(EulerStabError):
    """A function fails to escape to +/- infinity within the representable range."""


class RegularityViolation(EulerStabError):
    """A derivative is unavailable or a function is not monotone where required."""


class QuadratureFailure(EulerStabError):
    """Adaptive quadrature could not meet the requested tolerance."""


class SolverFailure(EulerStabError):
    """A linear solve hit its iteration cap without converging."""


class GridMismatch(EulerStabError):
    """Fields living on incompatible grids were combined."""


class ConvergenceFailure(EulerStabError):
    """Eigenvalue iteration did not reach the requested residual."""


class MassViolation(EulerStabError):
    """A nonnegative weight with positive total mass was required."""


class NoConvergence(EulerStabError):
    """Nonlinear iteration hit its cap; carries the last residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ResonanceError(EulerStabError):
    """A linear steady solve was requested too close to an eigenvalue."""


class RootBracketFailure(EulerStabError):
    """Bisection could not bracket the requested root."""


class ClassViolation(EulerStabError):
    """A sample failed the rearrangement-class membership check."""


class SupportViolation(EulerStabError):
    """A generator field does not vanish on the boundary collar."""


class CFLViolation(EulerStabError):
    """A time step violates the advective stability constraint."""
