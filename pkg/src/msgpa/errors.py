"""Exception types raised across the package."""


class MSGPAError(Exception):
    """Base class for all package errors."""


class DimensionError(MSGPAError, ValueError):
    """Operator or state dimensions do not match the declared tensor structure."""


class DensityMatrixError(MSGPAError, ValueError):
    """Input is not a valid density matrix."""


class SingularParameterError(MSGPAError, ValueError):
    """A closed-form expression is singular at the given parameters (e.g. zero detuning)."""


class RegimeError(MSGPAError, ValueError):
    """Parameters do not satisfy the regime an operation requires."""


class NumericalError(MSGPAError, RuntimeError):
    """A numerical procedure failed; ``hint`` suggests a remedy."""

    def __init__(self, message, hint=None):
        super().__init__(message)
        self.hint = hint


class StepSizeError(NumericalError):
    """Integrator accuracy check failed; use more steps."""


class ResolutionError(NumericalError):
    """Time sampling too coarse for a geometric-phase estimator."""


class RefinementError(NumericalError):
    """Eigenbranch continuity lost between consecutive samples."""


class CalibrationError(NumericalError):
    """Noise-rate calibration could not bracket or converge on the target."""


class ConfigError(MSGPAError, ValueError):
    """Scenario configuration is malformed or violates a parameter invariant."""
