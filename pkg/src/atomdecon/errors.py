"""Exception types raised by the estimators and numerical routines."""


class DeconvolutionError(Exception):
    """Base class for all package errors."""


class ExponentOverflow(DeconvolutionError, OverflowError):
    """The damping factor exp(sigma^2 / (2 h^2)) would overflow double range."""


class CoverageError(DeconvolutionError, ValueError):
    """The frequency grid does not cover the support [0, 1/h] of the integrand."""


class MaxDepthExceeded(DeconvolutionError, ArithmeticError):
    """Adaptive quadrature hit its depth cap before meeting the tolerance."""


class NonIntegrableMoment(DeconvolutionError, ValueError):
    """The requested kernel moment does not exist for this kernel's tail."""


class DomainError(DeconvolutionError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class DegenerateModel(DeconvolutionError, ValueError):
    """The model has zero signal variance."""


class EmptyInput(DeconvolutionError, ValueError):
    """An operation received an empty sequence."""


class NumericalError(DeconvolutionError, ArithmeticError):
    """A numerical sanity check failed (e.g. a non-negligible imaginary part)."""
