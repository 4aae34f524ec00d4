"""Fractal strings with prescribed abscissae of convergence, meromorphy and paramorphy.

Given ``0 <= d_inf < d1 <= d < 1`` the string built here is

    union over k >= 1 of (2^-k / L_k) * L_inf(m_k, a_k)

where ``L_inf(m, a)`` is the infinite-order generalized Cantor string, ``L_k``
its total length, ``D_k`` decreases from ``d1`` to ``d_inf``, ``m_k`` strictly
increases and ``a_k = m_k^(-1/D_k)``.  Each component contributes a vertical
line ``D_k + i p_k Z`` of essential singularities; the lines accumulate at the
barrier ``Re s = d_inf``.  When ``d > d1`` a generalized Cantor string of
dimension ``d`` is added, which moves the abscissa of convergence to ``d``
without creating new singularities right of ``d1`` other than its poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cantor import CantorParams, SingularityLattice, singularity_lattice
from .errors import ConstructionError, OutsideHalfPlaneError
from .strings import GenCantor, InfiniteOrder, PartFamily, StringExpr, Union, WeightedUnion
from .zeta import DEFAULT_GUARD, EvalResult, epsilon_bound, eval_zeta, inverse_factorial_series

__all__ = [
    "CantorSchedule",
    "PrescribedString",
    "AbscissaReport",
    "construct",
    "singularities_in_window",
    "report",
    "eval_constructed",
    "certify_disk",
]

_E_MINUS_ONE = math.e - 1.0


class CantorSchedule(PartFamily):
    """The infinite family of weighted infinite-order Cantor strings.

    ``D_k = d_inf + (d1 - d_inf) * theta^(k-1)`` and ``m_k = m_first + m_step (k-1)``.
    """

    count = None

    def __init__(self, d_inf: float, d1: float, theta: float = 0.5, m_first: int = 2, m_step: int = 1):
        if not 0 <= d_inf < d1 < 1:
            raise ConstructionError(f"need 0 <= d_inf < d1 < 1, got d_inf={d_inf!r}, d1={d1!r}")
        if not 0 < theta < 1:
            raise ConstructionError("theta must lie in (0, 1)")
        if int(m_first) != m_first or m_first < 2 or int(m_step) != m_step or m_step < 1:
            raise ConstructionError("need integer m_first >= 2 and m_step >= 1")
        self.d_inf, self.d1, self.theta = float(d_inf), float(d1), float(theta)
        self.m_first, self.m_step = int(m_first), int(m_step)
        self._lengths: dict[int, float] = {}
        self.L(1)  # rejects schedules whose first length overflows

    def __eq__(self, other):
        return isinstance(other, CantorSchedule) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.d_inf, self.d1, self.theta, self.m_first, self.m_step)

    def __repr__(self):
        return "CantorSchedule(d_inf={}, d1={}, theta={}, m_first={}, m_step={})".format(*self._key())

    def D(self, k: int) -> float:
        return self.d_inf + (self.d1 - self.d_inf) * self.theta ** (k - 1)

    def m(self, k: int) -> int:
        return self.m_first + self.m_step * (k - 1)

    def log_inv_a(self, k: int) -> float:
        return math.log(self.m(k)) / self.D(k)

    def a(self, k: int) -> float:
        return math.exp(-self.log_inv_a(k))

    def period(self, k: int) -> float:
        return 2 * math.pi / self.log_inv_a(k)

    def params(self, k: int) -> CantorParams:
        return CantorParams(self.m(k), self.a(k), self.log_inv_a(k))

    def L(self, k: int) -> float:
        """Total length of the k-th infinite-order string."""
        if k not in self._lengths:
            one_minus = -math.expm1((1.0 - 1.0 / self.D(k)) * math.log(self.m(k)))
            x = 1.0 / one_minus
            if x > 700:
                raise ConstructionError(
                    f"component {k} has total length exp({x:.4g}) - 1, beyond double range; lower d1"
                )
            self._lengths[k] = math.expm1(x)
        return self._lengths[k]

    def weight(self, k: int) -> float:
        return 2.0**-k / self.L(k)

    def part(self, k):
        return self.weight(k), InfiniteOrder(self.m(k), self.a(k), self.log_inv_a(k))

    def length_tail(self, K):
        return 2.0**-K

    def head_bound(self, k):
        return 2.0**-k / _E_MINUS_ONE

    def zeta_tail(self, K, s, tol=None):
        s = np.asarray(s, dtype=complex)
        sig = s.real
        out = np.full(s.shape, np.inf)
        dk = self.D(K + 1)
        ok = sig > dk
        if tol is not None:
            # the series factor is at least 1/eps >= 1, so skip hopeless points
            pre = _E_MINUS_ONE**-sig * 2.0 ** (-(K + 1) * sig) / -np.expm1(-sig * math.log(2.0))
            ok &= pre <= tol
        if not ok.any():
            return out
        sg = sig[ok]
        eps = -np.expm1((1.0 - sg / dk) * math.log(self.m(K + 1)))
        series, fine = inverse_factorial_series(1.0 / eps, sg, 1e-3)
        pre = _E_MINUS_ONE**-sg * 2.0 ** (-(K + 1) * sg) / -np.expm1(-sg * math.log(2.0))
        out[ok] = np.where(fine, pre * series, np.inf)
        return out

    def outside(self, s):
        return np.asarray(s, dtype=complex).real <= self.d_inf

    def abscissa(self):
        return self.d1

    def to_json(self):
        return {
            "kind": "cantor_schedule",
            "d_inf": self.d_inf,
            "d1": self.d1,
            "theta": self.theta,
            "m_first": self.m_first,
            "m_step": self.m_step,
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["d_inf"], d["d1"], d.get("theta", 0.5), d.get("m_first", 2), d.get("m_step", 1))

    def lines_right_of(self, x: float):
        """Indices k with D_k >= x (x > d_inf)."""
        if x <= self.d_inf:
            raise ConstructionError("infinitely many lines lie right of the barrier")
        k = 1
        while self.D(k) >= x:
            yield k
            k += 1


@dataclass(frozen=True)
class AbscissaReport:
    d_par: float
    d_mer: float
    d_abs: float
    barrier: float
    exactness: dict = field(default_factory=lambda: {
        "d_par": "exact-by-construction",
        "d_mer": "exact-by-construction",
        "d_abs": "exact-by-construction",
    })

    def __post_init__(self):
        if not self.d_par <= self.d_mer <= self.d_abs:
            raise ConstructionError("abscissae must satisfy d_par <= d_mer <= d_abs")

    def to_json(self):
        return {
            "d_par": self.d_par,
            "d_mer": self.d_mer,
            "d_abs": self.d_abs,
            "barrier": self.barrier,
            "exactness": dict(self.exactness),
        }


@dataclass(frozen=True, eq=False)
class PrescribedString:
    d_inf: float
    d1: float
    d: float
    schedule: CantorSchedule
    core: WeightedUnion
    extra: CantorParams | None
    expr: StringExpr

    @property
    def case(self) -> str:
        return "ii" if self.extra is not None else "i"

    def lattices(self, re_min: float) -> list[SingularityLattice]:
        """All singularity lattices with real part >= re_min (> d_inf)."""
        out = [singularity_lattice(self.schedule.params(k), math.inf) for k in self.schedule.lines_right_of(re_min)]
        if self.extra is not None and self.extra.dimension >= re_min:
            out.append(singularity_lattice(self.extra, 1))
        return out

    def to_json(self, n_listed: int = 12) -> dict:
        sch = self.schedule
        ks = range(1, n_listed + 1)
        return {
            "d_inf": self.d_inf,
            "d1": self.d1,
            "d": self.d,
            "case": self.case,
            "schedule": sch.to_json(),
            "D_k": [sch.D(k) for k in ks],
            "m_k": [sch.m(k) for k in ks],
            "a_k": [sch.a(k) for k in ks],
            "L_k": [sch.L(k) for k in ks],
            "p_k": [sch.period(k) for k in ks],
            "extra_atom": None if self.extra is None else self.extra.to_json(),
            "core_total_length": self.core.total_length,
            "total_length": self.expr.total_length,
        }


def construct(d_inf: float, d1: float, d: float, theta: float = 0.5, m_first: int = 2, m_step: int = 1,
              extra_m: int = 2) -> PrescribedString:
    """Build the string with abscissae (d_inf, d1, d).

    Raises ConstructionError unless ``0 <= d_inf < d1 <= d < 1``.  Dimension 1
    cannot be realized by generalized Cantor atoms (it needs ``m a = 1``).
    """
    for name, val in (("d_inf", d_inf), ("d1", d1), ("d", d)):
        if not math.isfinite(val):
            raise ConstructionError(f"{name} must be finite")
    for ok, rule in ((0 <= d_inf, "0 <= d_inf"), (d_inf < d1, "d_inf < d1"), (d1 <= d, "d1 <= d"), (d < 1, "d < 1")):
        if not ok:
            raise ConstructionError(f"{rule} violated by (d_inf, d1, d) = ({d_inf}, {d1}, {d})")
    sch = CantorSchedule(d_inf, d1, theta, m_first, m_step)
    core = WeightedUnion(sch)
    extra = None
    expr: StringExpr = core
    if d > d1:
        extra = CantorParams.from_dimension(extra_m, d)
        expr = Union((core, GenCantor(extra.m, extra.a, extra.log_inv_a)))
    return PrescribedString(float(d_inf), float(d1), float(d), sch, core, extra, expr)


def singularities_in_window(p: PrescribedString, re_min, re_max, im_min, im_max) -> list[tuple[complex, str]]:
    """Singular points inside the closed window, sorted by (real, imaginary) part.

    The window must stay right of the barrier; the caller clips otherwise.
    """
    if re_min <= p.d_inf:
        raise ConstructionError("window reaches the barrier, where singularities accumulate")
    out = []
    for lat in p.lattices(re_min):
        kind = "essential" if lat.kind == "essential" else f"pole({lat.order})"
        out.extend((z, kind) for z in lat.points_in_window(re_min, re_max, im_min, im_max))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def report(p: PrescribedString) -> AbscissaReport:
    return AbscissaReport(p.d_inf, p.d1, p.d, p.d_inf)


def eval_constructed(p: PrescribedString, s: complex, tol: float = 1e-10, guard: float = DEFAULT_GUARD) -> EvalResult:
    s = complex(s)
    if s.real <= p.d_inf:
        raise OutsideHalfPlaneError(f"Re s = {s.real} is not right of the barrier {p.d_inf}")
    return eval_zeta(p.expr, s, tol, guard)


def certify_disk(p: PrescribedString, center: complex, radius: float):
    """Epsilon certificate for the core schedule on a disk."""
    return epsilon_bound(p.schedule, center, radius)
