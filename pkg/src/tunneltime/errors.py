"""Exception and warning types raised across the package."""


class TunnelTimeError(Exception):
    """Base class for all package errors."""


class ThresholdError(TunnelTimeError, ValueError):
    """Energy coincides with a segment potential (E == V within the guard band).

    The closed forms divide by ``p`` or ``beta`` there; use the one-sided
    probes in :mod:`tunneltime.kinematics` instead.
    """

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class DomainError(TunnelTimeError, ValueError):
    """Inputs outside the regime an operation is defined for."""


class WidthOverflowError(TunnelTimeError, OverflowError):
    """An evanescent segment is too wide to represent (p*w > 700)."""


class UndefinedPhaseError(TunnelTimeError, ArithmeticError):
    """Amplitude too small for its phase to be meaningful."""

    def __init__(self, message, resonance=False):
        super().__init__(message)
        self.resonance = resonance


class BranchJumpError(TunnelTimeError, ArithmeticError):
    """Phase samples around the evaluation energy are not on one smooth branch."""


class NonConvergenceError(TunnelTimeError, ArithmeticError):
    """Numerical derivative or quadrature failed to meet its tolerance."""


class MissingLightSpeedError(TunnelTimeError, ValueError):
    """Superluminal analysis requested without a light speed in the context."""


class RegimeWarning(UserWarning):
    """Result computed outside the regime where an approximation is trusted."""
