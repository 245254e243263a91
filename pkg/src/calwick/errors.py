"""Exception types shared across the package."""


class CalwickError(Exception):
    """Base class for all package errors."""


class NonLorentzian(CalwickError):
    """Lorentzian metric evaluation failed (h <= 0 or N <= 0)."""


class HypothesisViolation(CalwickError):
    """The complex metric fails the ellipticity/positivity hypotheses."""


class GridAsymmetry(CalwickError):
    """A grid operation required reflection symmetry the grid lacks."""


class GridTooCoarse(CalwickError):
    """Not enough grid nodes for the requested stencil or resolution."""


class SingularSystem(CalwickError):
    """Discrete elliptic system is singular or numerically near-singular.

    Carries the (normalized) near-null vector when one was identified.
    """

    def __init__(self, message, near_null=None):
        super().__init__(message)
        self.near_null = near_null


class RegionMismatch(CalwickError):
    """Fields passed to a half-region operation live on different regions."""


class DegenerateNormal(CalwickError):
    """Boundary normal undefined: |k^ss| below tolerance."""


class ModeMismatch(CalwickError):
    """Operands were built for different Fourier mode sets or grids."""


class CflViolation(CalwickError):
    """Time step too large for the requested evolution."""


class WindowExceeded(CalwickError):
    """Requested time lies outside the configured evolution window."""


class NotStationary(CalwickError):
    """Operation requires time-independent coefficients."""


class CutoffViolation(CalwickError):
    """Cutoff function has a nonzero normal derivative on the interface."""


class CoincidentPoints(CalwickError):
    """Kernel extraction requested exactly at the source node."""


class BoundaryMismatch(CalwickError):
    """Strip boundary rows are sampled on different grids."""


class NonConvergent(CalwickError):
    """Extrapolation to the boundary failed to converge."""


class ConfigError(CalwickError):
    """Scenario configuration is missing or has invalid keys."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
