"""Closed forms for generalized Cantor strings of finite and infinite order."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, SingularityError

__all__ = [
    "CantorParams",
    "SingularityLattice",
    "one_minus_mas",
    "closed_form_zeta",
    "cantor_string_zeta",
    "self_similar_zeta",
    "laurent_principal",
    "laurent_numeric",
    "richardson",
    "singularity_lattice",
    "infinite_order_length",
    "SINGULAR_DENOMINATOR",
]

# |1 - m a^s| below this is treated as a hit on the lattice
SINGULAR_DENOMINATOR = 1e-12

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CantorParams:
    """Parameters (m, a) of the generalized Cantor string with m copies of ratio a."""

    m: int
    a: float
    log_inv_a: float | None = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ConstructionError(f"m must be an integer >= 2, got {self.m!r}")
        lia = self.log_inv_a
        if lia is None:
            if not (0 < self.a < 1.0 / self.m):
                raise ConstructionError(f"a must lie in (0, 1/m), got {self.a!r}")
            lia = -math.log(self.a)
        elif not lia > math.log(self.m):
            raise ConstructionError("need m * a < 1")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "log_inv_a", float(lia))

    @classmethod
    def from_dimension(cls, m: int, dimension: float) -> "CantorParams":
        """The unique a with log_{1/a} m = dimension (0 < dimension < 1)."""
        if not 0 < dimension < 1:
            raise ConstructionError(f"dimension must lie in (0, 1), got {dimension!r}")
        lia = math.log(m) / dimension
        return cls(m, math.exp(-lia), lia)

    @classmethod
    def of(cls, expr) -> "CantorParams":
        return cls(expr.m, expr.a, expr.log_inv_a)

    @property
    def dimension(self) -> float:
        return math.log(self.m) / self.log_inv_a

    D = dimension

    @property
    def period(self) -> float:
        return _TWO_PI / self.log_inv_a

    def lattice_point(self, j: int) -> complex:
        return complex(self.dimension, self.period * j)

    def to_json(self) -> dict:
        return {"m": self.m, "a": self.a, "log_inv_a": self.log_inv_a,
                "dimension": self.dimension, "period": self.period}


@dataclass(frozen=True)
class SingularityLattice:
    """The vertical arithmetic set ``real_part + period * i * Z``.

    ``kind`` is ``"pole"`` (with ``order``) or ``"essential"``.
    """

    real_part: float
    period: float
    kind: str = "pole"
    order: int | None = 1

    def __post_init__(self):
        if not self.period > 0:
            raise ConstructionError("lattice period must be positive")
        if self.kind not in ("pole", "essential"):
            raise ConstructionError(f"unknown singularity kind {self.kind!r}")
        if self.kind == "pole" and (self.order is None or self.order < 1):
            raise ConstructionError("pole order must be >= 1")
        if self.kind == "essential":
            object.__setattr__(self, "order", None)

    def point(self, j: int) -> complex:
        return complex(self.real_part, self.period * j)

    def nearest(self, s: complex) -> complex:
        return self.point(round(complex(s).imag / self.period))

    def distance(self, s):
        """Distance from s (scalar or array) to the nearest lattice point."""
        s = np.asarray(s, dtype=complex)
        j = np.rint(s.imag / self.period)
        return np.abs(s - (self.real_part + 1j * self.period * j))

    def points_in_window(self, re_min, re_max, im_min, im_max) -> list[complex]:
        if not re_min <= self.real_part <= re_max:
            return []
        lo = math.ceil(im_min / self.period - 1e-12)
        hi = math.floor(im_max / self.period + 1e-12)
        return [self.point(j) for j in range(lo, hi + 1)]

    def describe(self) -> str:
        kind = "essential" if self.kind == "essential" else f"pole of order {self.order}"
        return f"{self.real_part!r} + {self.period!r}*i*Z ({kind})"

    def to_json(self) -> dict:
        return {"real_part": self.real_part, "period": self.period, "kind": self.kind, "order": self.order}


def one_minus_mas(m, log_inv_a, s):
    """``1 - m * a**s`` for arrays, accurate near the zeros of the expression.

    The exponent ``log m - s log(1/a)`` is reduced modulo ``2 pi i`` before
    exponentiating, so the relative accuracy near every lattice point is the
    same as near the real one.
    """
    s = np.asarray(s, dtype=complex)
    w = math.log(m) - s * log_inv_a
    w = w - 1j * _TWO_PI * np.rint(w.imag / _TWO_PI)
    return -np.expm1(w)


def _raise_singular(params: CantorParams, s: complex, order):
    lat = singularity_lattice(params, order)
    raise SingularityError(
        f"s = {s} lies on the singularity lattice {lat.describe()}",
        point=s,
        nearest=lat.nearest(s),
        lattice=lat,
    )


def closed_form_zeta(params: CantorParams, n: int, s: complex) -> complex:
    """zeta of the n-th order string: ``(1 - m a^s)^(-n)``."""
    if int(n) != n or n < 1:
        raise ConstructionError("order n must be an integer >= 1")
    s = complex(s)
    d = complex(one_minus_mas(params.m, params.log_inv_a, s))
    if abs(d) < SINGULAR_DENOMINATOR:
        _raise_singular(params, s, int(n))
    return (1.0 / d) ** int(n)


def cantor_string_zeta(s: complex) -> complex:
    """zeta of the Cantor string, ``1 / (3^s - 2)``."""
    s = complex(s)
    d = complex(one_minus_mas(2, math.log(3.0), s))
    if abs(d) < SINGULAR_DENOMINATOR:
        _raise_singular(CantorParams(2, 1.0 / 3.0), s, 1)
    return cmath.exp(-s * math.log(3.0)) / d


def self_similar_zeta(ratios, s: complex) -> complex:
    """``1 / (1 - sum r_j^s)``."""
    ratios = [float(r) for r in ratios]
    if not ratios or any(not 0 < r < 1 for r in ratios) or math.fsum(ratios) >= 1:
        raise ConstructionError("ratios must lie in (0,1) with sum < 1")
    s = complex(s)
    if len(set(ratios)) == 1:
        return closed_form_zeta(CantorParams(len(ratios), ratios[0]), 1, s)
    d = 1.0 - sum(cmath.exp(s * math.log(r)) for r in ratios)
    if abs(d) < SINGULAR_DENOMINATOR:
        raise SingularityError(f"s = {s} is a root of the Moran-type equation", point=s)
    return 1.0 / d


def laurent_principal(params: CantorParams, n: int, j: int = 0) -> float:
    """Leading Laurent coefficient of ``(1 - m a^s)^(-n)`` at ``s_j = D + i p j``.

    Near ``s_j`` one has ``1 - m a^s = log(1/a) (s - s_j) + O((s - s_j)^2)``,
    since ``m a^{s_j} = 1``; so the coefficient is ``log(1/a)^(-n)`` for every j.
    """
    if int(n) != n or n < 1:
        raise ConstructionError("order n must be an integer >= 1")
    return params.log_inv_a ** (-int(n))


def richardson(f, h0: float, levels: int = 6, ratio: float = 0.5) -> complex:
    """Extrapolate ``lim_{h->0} f(h)`` assuming an expansion in integer powers of h."""
    row = [complex(f(h0 * ratio**k)) for k in range(levels)]
    for p in range(1, levels):
        factor = ratio ** (-p)
        row = [(factor * row[i + 1] - row[i]) / (factor - 1.0) for i in range(len(row) - 1)]
    return row[0]


_DIRECTIONS = {"right": 1.0, "left": -1.0, "up": 1j, "down": -1j}


def laurent_numeric(params: CantorParams, n: int, j: int = 0, direction="right", h0: float = 0.05, levels: int = 6) -> complex:
    """Numerical limit of ``(s - s_j)^n zeta_n(s)`` as ``s -> s_j`` along a ray.

    ``direction`` is one of right/left/up/down or a unit complex number.
    """
    u = complex(_DIRECTIONS.get(direction, direction)) if isinstance(direction, str) else complex(direction)
    sj = params.lattice_point(j)

    def f(h):
        z = h * u
        return z**n * closed_form_zeta(params, n, sj + z)

    return richardson(f, h0, levels)


def singularity_lattice(params: CantorParams, n_or_infinite=1) -> SingularityLattice:
    """Lattice of complex dimensions; pass ``math.inf`` or ``"infinite"`` for infinite order."""
    if n_or_infinite in ("infinite", "inf") or n_or_infinite == math.inf:
        return SingularityLattice(params.dimension, params.period, "essential", None)
    if int(n_or_infinite) != n_or_infinite or n_or_infinite < 1:
        raise ConstructionError("order must be a positive integer or infinite")
    return SingularityLattice(params.dimension, params.period, "pole", int(n_or_infinite))


def infinite_order_length(params: CantorParams) -> float:
    """Total length ``exp(1 / (1 - m a)) - 1`` of the infinite-order string."""
    one_minus = -math.expm1(math.log(params.m) - params.log_inv_a)
    return math.expm1(1.0 / one_minus)
