"""Exception types shared across the package."""


class PlapError(Exception):
    """Base class for all package errors."""


class ConfigError(PlapError):
    """Bad problem definition or run configuration."""


class GridMismatch(PlapError):
    """A field does not live on the expected periodic grid."""


class NumericalError(PlapError):
    """Base class for failures of the numerical machinery."""


class NoConvergence(NumericalError):
    """Iteration budget exhausted without meeting the tolerance."""


class DegenerateDenominator(NumericalError):
    """Weighted integral too small for a Rayleigh quotient."""


class InfeasibleConstraint(NumericalError):
    """The normalization constraint set is empty for the requested sign."""


class SignChangeDetected(NumericalError):
    """An iterate converged to a sign-changing profile where a one-signed
    one was required."""


class OracleFailure(NumericalError):
    """The shooting oracle could not produce a usable answer."""


class SeedCorrectionFailed(NumericalError):
    """Newton correction of a branch seed did not converge."""


class InapplicableFixture(PlapError):
    """The inputs do not satisfy the preconditions of a comparison check."""
