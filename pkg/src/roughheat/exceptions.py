"""Exception hierarchy shared across the package."""


class RoughHeatError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RoughHeatError, ValueError):
    """Invalid configuration value (grid sizes, config file contents, ...)."""


class DomainError(RoughHeatError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ShapeError(RoughHeatError, ValueError):
    """Field or path sampled on a mismatched grid."""


class CoefficientError(RoughHeatError, ValueError):
    """Diffusion coefficient could not be evaluated."""


class ValidationError(RoughHeatError, ValueError):
    """Coefficient hypothesis validation could not be carried out."""


class NumericsError(RoughHeatError, RuntimeError):
    """Numerical procedure failed (quadrature non-convergence, ...)."""


class ConvergenceError(NumericsError):
    """Iteration exceeded its budget without meeting tolerance."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class BlowUpError(NumericsError):
    """Trajectory exceeded the blow-up guard."""

    def __init__(self, message, step=None, path=None):
        super().__init__(message)
        self.step = step
        self.path = path
