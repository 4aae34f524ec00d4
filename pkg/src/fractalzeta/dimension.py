"""Abscissa of convergence: structural rules and a counting-function estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, EstimateUnavailable
from .strings import (
    Explicit,
    GenCantor,
    InfiniteOrder,
    MaxTerms,
    Power,
    Scale,
    SelfSimilar,
    SeriesLift,
    StringExpr,
    Tensor,
    Union,
    WeightedUnion,
    enumerate_lengths,
)

__all__ = ["DimensionEstimate", "exact_abscissa", "estimate_abscissa", "moran_root"]

EXACT = "exact-symbolic"
REGRESSION = "prefix-regression"


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    method: str
    confidence_width: float = 0.0

    def __post_init__(self):
        if self.method not in (EXACT, REGRESSION):
            raise ConstructionError(f"unknown estimation method {self.method!r}")
        if not self.confidence_width >= 0:
            raise ConstructionError("confidence width must be nonnegative")

    def brackets(self, x: float, slack: float = 0.0) -> bool:
        return abs(self.value - x) <= self.confidence_width + slack

    def to_json(self):
        return {"value": self.value, "method": self.method, "confidence_width": self.confidence_width}


def moran_root(ratios, tol: float = 1e-12) -> float:
    """Unique real root of ``sum r_j^s = 1`` by bisection."""
    logs = [math.log(r) for r in ratios]

    def f(s):
        return math.fsum(math.exp(s * lr) for lr in logs) - 1.0

    # f(0) = len - 1 >= 0 and f(1) = sum - 1 < 0; f is decreasing
    lo, hi = 0.0, 1.0
    if f(lo) <= 0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _abscissa(e: StringExpr) -> float:
    if isinstance(e, Explicit):
        return 0.0
    if isinstance(e, (GenCantor, InfiniteOrder)):
        return e.dimension
    if isinstance(e, SelfSimilar):
        if len(set(e.ratios)) == 1:
            return math.log(len(e.ratios)) / -math.log(e.ratios[0])
        return moran_root(e.ratios)
    if isinstance(e, Power):
        return _abscissa(e.base)
    if isinstance(e, Scale):
        return _abscissa(e.inner)
    if isinstance(e, SeriesLift):
        # the n = 0 term is the unit string; every power of inner has its abscissa
        return _abscissa(e.inner)
    if isinstance(e, (Union, Tensor)):
        # a product of Dirichlet series with positive terms converges iff each factor does
        return max(_abscissa(p) for p in e.parts)
    if isinstance(e, WeightedUnion):
        try:
            return float(e.family.abscissa())
        except NotImplementedError:
            raise EstimateUnavailable(f"family {e.family!r} does not certify its abscissa") from None
    raise ConstructionError(f"unknown string expression {type(e).__name__}")


def exact_abscissa(e: StringExpr) -> DimensionEstimate:
    """Abscissa of absolute convergence from the expression's structure."""
    return DimensionEstimate(_abscissa(e), EXACT, 0.0)


def estimate_abscissa(e: StringExpr, n_terms: int = 10_000) -> DimensionEstimate:
    """Least-squares slope of ``log N(lambda)`` against ``log(1/lambda)``.

    ``N`` is evaluated at each distinct enumerated length.  The last distinct
    length is dropped because its multiplicity may be cut short, and so is the
    first half of the levels, where lower-order terms of the counting function
    still bend the curve.  The width is twice the slope's standard error plus
    the gap between the slopes fitted on the two halves of the window, which
    catches curvature that the residuals alone understate.
    """
    if n_terms < 100:
        raise ConstructionError("estimate_abscissa needs n_terms >= 100")
    terms = list(enumerate_lengths(e, MaxTerms(n_terms)))
    if sum(t.multiplicity for t in terms) < n_terms:
        return DimensionEstimate(0.0, REGRESSION, 0.0)
    lengths = np.array([t.length for t in terms[:-1]])
    counts = np.cumsum([t.multiplicity for t in terms[:-1]], dtype=float)
    x, y = -np.log(lengths), np.log(counts)
    half = len(x) // 2
    if len(x) - half >= 3:
        x, y = x[half:], y[half:]
    if len(x) < 3:
        raise EstimateUnavailable("too few distinct lengths for a regression")
    slope, stderr = _fit(x, y)
    mid = len(x) // 2
    drift = abs(_fit(x[mid:], y[mid:])[0] - _fit(x[: mid + 1], y[: mid + 1])[0])
    return DimensionEstimate(slope, REGRESSION, 2.0 * stderr + drift)


def _fit(x, y):
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ (y - y.mean())) / sxx
    resid = y - y.mean() - slope * xm
    dof = len(x) - 2
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return slope, stderr
