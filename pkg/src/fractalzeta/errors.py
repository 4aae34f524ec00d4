"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FractalZetaError(Exception):
    """Base class for every error raised by this package."""


class ConstructionError(FractalZetaError, ValueError):
    """An expression or construction was rejected (divergence, bad parameters)."""


class NumericalDomainError(FractalZetaError):
    """A numerical evaluation cannot be carried out at the requested point."""


class SingularityError(NumericalDomainError):
    """The point lies on, or within the guard distance of, a known singularity.

    Attributes
    ----------
    point : complex
        Where evaluation was requested.
    nearest : complex or None
        The nearest known singular point, when it is known.
    lattice : object or None
        Description of the lattice containing ``nearest``.
    """

    def __init__(self, message, point=None, nearest=None, lattice=None):
        super().__init__(message)
        self.point = point
        self.nearest = nearest
        self.lattice = lattice


class OutsideHalfPlaneError(NumericalDomainError):
    """The point lies outside the half-plane where the evaluation is valid."""


class UncertifiedError(NumericalDomainError):
    """No certified truncation bound could be obtained."""


class ValueOverflowError(NumericalDomainError):
    """The value exists but its magnitude exceeds double precision range."""


class EstimateUnavailable(FractalZetaError):
    """A dimension or abscissa cannot be determined for this input."""
