"""Geometric zeta functions of fractal strings, strings with prescribed
abscissae of convergence, meromorphic and paramorphic continuation, and
distance zeta functions of fractal sets."""

from .cantor import CantorParams, SingularityLattice, cantor_string_zeta, closed_form_zeta, singularity_lattice
from .dimension import DimensionEstimate, estimate_abscissa, exact_abscissa
from .errors import (
    ConstructionError,
    EstimateUnavailable,
    FractalZetaError,
    NumericalDomainError,
    OutsideHalfPlaneError,
    SingularityError,
    UncertifiedError,
    ValueOverflowError,
)
from .parse import ParseError, parse_complex, parse_expr, parse_set
from .prescriber import AbscissaReport, PrescribedString, construct, report, singularities_in_window
from .strings import (
    Explicit,
    GenCantor,
    InfiniteOrder,
    LengthTerm,
    MaxDistinct,
    MaxTerms,
    MinLength,
    Power,
    SelfSimilar,
    StringExpr,
    Tensor,
    Union,
    cantor_string,
    enumerate_lengths,
    lift,
    scale,
)
from .zeta import EvalResult, eval_zeta, eval_zeta_array

__version__ = "0.1.0"
