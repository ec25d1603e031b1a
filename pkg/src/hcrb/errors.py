"""Exception hierarchy shared across the package."""


class HcrbError(Exception):
    """Base class for all package errors."""


class ScenarioError(HcrbError):
    """Invalid scenario, config or schema input (CLI exit code 1)."""


class RegularityError(HcrbError):
    """Contour tangent vanishes somewhere: the curve is not regular."""


class QuadratureError(HcrbError):
    """Quadrature did not converge under refinement."""


class IdentifiabilityError(HcrbError):
    """Singular information matrix (CLI exit code 2).

    Carries an optional null-space basis so the caller can report which
    parameter combinations are unidentifiable.
    """

    def __init__(self, message, null_space=None, labels=None):
        super().__init__(message)
        self.null_space = null_space
        self.labels = labels


class NoIlluminationError(IdentifiabilityError):
    """Reflection weight w vanishes on the whole contour."""
