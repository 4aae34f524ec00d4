"""Distance zeta functions of sets built from fractal strings.

A set here is a one-dimensional core (the realization of a string, or a
generalized Cantor set) times unit intervals and/or points, or a union of such
products.  For ``A`` in R^N and ``delta > 0``

    zeta_A(s) = integral over A_delta of d(x, A)^(s - N) dx.

Closed forms exist on the line and for the shift formula of grills; anything
else is estimated by Monte Carlo with a reported standard error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .cantor import CantorParams, SingularityLattice, singularity_lattice
from .dimension import exact_abscissa
from .errors import ConstructionError, EstimateUnavailable, FractalZetaError, OutsideHalfPlaneError
from .prescriber import construct
from .strings import InfiniteOrder, MaxDistinct, StringExpr, enumerate_lengths
from .zeta import EPS, eval_zeta, known_lattices

__all__ = [
    "GeometricSet",
    "Realization",
    "GenCantorSet",
    "Grill",
    "EmbeddedFlat",
    "UnionSet",
    "MCResult",
    "dzeta_line",
    "dzeta_line_bounded",
    "dzeta_grill",
    "dzeta_monte_carlo",
    "neighborhood_volume",
    "construct_set",
    "set_lattices",
    "shift_lattices",
    "default_delta",
    "abscissa_probe",
]

# realizations are materialized until the leftover interval is this fraction of delta
TAIL_FRACTION = 1e-6
MAX_RUNS = 1_000_000
# refuse an estimate whose runs miss more than this share of the gap weight
UNSAMPLED_LIMIT = 1e-2
_CHUNK = 1 << 16  # strata per random stream


@dataclass(frozen=True)
class _Runs:
    """Gaps of a one-dimensional core grouped into runs of equal length.

    Run r occupies ``[lo[r], hi[r]]`` and is cut into ``mu[r]`` gaps of length
    ``ell[r]``; runs are stored right to left.  ``tail`` is the leftover
    interval ``[0, tail]`` treated as a single gap.
    """

    ell: np.ndarray
    mu: np.ndarray
    hi: np.ndarray
    lo: np.ndarray
    tail: float
    extent: float
    missing: float = 0.0  # share of sum mu l^q not covered by the runs


class GeometricSet:
    ambient: int = 1

    @property
    def dimension(self) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class _Core(GeometricSet):
    """A compact subset of [0, extent] in R."""

    extent: float

    def distance(self, x) -> np.ndarray:
        raise NotImplementedError

    def gap_runs(self, tail_tol: float) -> _Runs:
        raise NotImplementedError

    def max_gap(self) -> float:
        raise NotImplementedError


class Realization(_Core):
    """The points ``a_k = l_k + l_(k+1) + ...`` of a bounded string, together with 0."""

    def __init__(self, of: StringExpr):
        self.of = of
        self.extent = float(of.total_length)
        if not (self.extent > 0 and math.isfinite(self.extent)):
            raise ConstructionError("realization needs a string of finite positive total length")
        self._ell: list[float] = []
        self._mu: list[float] = []
        self._cum: list[float] = []  # running total of the emitted lengths
        self._stream = enumerate_lengths(self.of, MaxDistinct(MAX_RUNS))
        self._done = False
        self._cache: dict = {}

    def __repr__(self):
        return f"Realization({self.of!r})"

    @property
    def dimension(self):
        return exact_abscissa(self.of).value

    def max_gap(self):
        return float(self.of.max_length)

    def _pull(self) -> bool:
        if self._done:
            return False
        t = next(self._stream, None)
        if t is None:
            self._done = True
            return False
        self._ell.append(t.length)
        self._mu.append(float(t.multiplicity))
        self._cum.append((self._cum[-1] if self._cum else 0.0) + t.length * t.multiplicity)
        return True

    def gap_runs(self, tail_tol: float, q: float | None = None, rel: float = 1e-6) -> _Runs:
        """Runs down to a leftover interval shorter than ``tail_tol``.

        With ``q`` given, runs are also added until the uncovered part of
        ``sum mu l^q`` (known from ``zeta_L(q)``) is at most ``rel`` of it;
        this is the depth needed by integrals that weight a gap of length l
        like ``l^q``.  Depth is capped at ``MAX_RUNS`` runs.
        """
        key = (float(tail_tol), q, rel)
        if key in self._cache:
            return self._cache[key]
        target = None
        if q is not None:
            try:
                target = eval_zeta(self.of, q, 1e-9).value.real
            except FractalZetaError:
                target = None
        n = 0
        wsum = 0.0
        while True:
            if n == len(self._ell) and not self._pull():
                break
            if q is not None:
                wsum += self._mu[n] * self._ell[n] ** q
            n += 1
            if self.extent - self._cum[n - 1] >= tail_tol:
                continue
            if target is None or target - wsum <= rel * target:
                break
        ell_a, mu_a = np.array(self._ell[:n]), np.array(self._mu[:n])
        exhausted = self._done and n == len(self._ell)
        tail = 0.0 if exhausted else max(self.extent - math.fsum(ell_a * mu_a), 0.0)
        if tail < 64 * np.finfo(float).eps * self.extent:
            tail = 0.0  # rounding noise, not a resolvable interval
        # positions summed from the bottom keep relative accuracy near 0
        seg = ell_a * mu_a
        lo = tail + np.concatenate((np.cumsum(seg[::-1])[::-1][1:], [0.0]))
        hi = lo + seg
        missing = max(target - wsum, 0.0) / target if target else 0.0
        runs = _Runs(ell_a, mu_a, hi, lo, tail, self.extent, missing)
        self._cache[key] = runs
        return runs

    def distance(self, x, tail_tol: float | None = None) -> np.ndarray:
        """Exact distance to the realization (binary search over the runs).

        Inside the leftover interval ``[0, tail]`` the distance to its ends is
        used, which over-estimates by at most ``tail / 2``.
        """
        runs = self.gap_runs(self.extent * 1e-9 if tail_tol is None else tail_tol)
        return _run_distance(runs, np.asarray(x, dtype=float))

    def to_json(self):
        from .strings import to_json

        return {"type": "realization", "of": to_json(self.of)}


def _run_distance(runs: _Runs, x: np.ndarray) -> np.ndarray:
    d = np.empty_like(x)
    left, right = x < 0, x > runs.extent
    d[left] = -x[left]
    d[right] = x[right] - runs.extent
    mid = ~(left | right)
    xm = x[mid]
    in_tail = xm < runs.tail
    r = np.searchsorted(-runs.lo, -xm, side="left")
    r = np.minimum(r, len(runs.lo) - 1)
    ell = runs.ell[r]
    u = (runs.hi[r] - xm) / ell
    f = u - np.floor(u)
    dm = ell * np.minimum(f, 1.0 - f)
    dm = np.where(in_tail, np.minimum(xm, runs.tail - xm), dm)
    d[mid] = np.maximum(dm, 0.0)
    return d


class GenCantorSet(_Core):
    """Generalized Cantor set in [0, 1]: keep m equally spaced intervals of length a, recursively."""

    def __init__(self, m: int, a: float):
        self.params = CantorParams(m, a)
        self.m, self.a = self.params.m, float(a)
        self.gap = (1.0 - self.m * self.a) / (self.m - 1)
        self.extent = 1.0

    def __repr__(self):
        return f"GenCantorSet({self.m}, {self.a})"

    @property
    def dimension(self):
        return self.params.dimension

    def max_gap(self):
        return self.gap

    def distance(self, x) -> np.ndarray:
        """Digit-greedy nearest point: descend into the interval containing x until x falls in a gap."""
        x = np.asarray(x, dtype=float)
        d = np.where(x < 0, -x, np.where(x > 1, x - 1, 0.0))
        idx = np.nonzero((x >= 0) & (x <= 1))[0]
        y = x[idx].copy()  # position in the current interval, rescaled to [0, 1]
        scale = np.ones(len(idx))
        step = self.a + self.gap
        while len(idx):
            i = np.clip(np.floor(y / step), 0, self.m - 1)
            r = y - i * step
            in_gap = r > self.a
            d[idx[in_gap]] = scale[in_gap] * np.minimum(r[in_gap] - self.a, step - r[in_gap])
            keep = ~in_gap
            scale = scale[keep] * self.a
            y = r[keep] / self.a
            idx = idx[keep]
            if len(idx) and scale[0] < 1e-300:
                d[idx] = 0.0
                break
        return d

    def gap_runs(self, tail_tol: float) -> _Runs:
        ell, mu = [], []
        j = 0
        left = 1.0
        while left >= tail_tol and j < 2000:
            ell.append(self.gap * self.a**j)
            mu.append(float((self.m - 1) * self.m**j))
            left = (self.m * self.a) ** (j + 1)
            j += 1
        # positions are not contiguous for this set; only lengths are used
        ell_a, mu_a = np.array(ell), np.array(mu)
        return _Runs(ell_a, mu_a, np.full(len(ell), np.nan), np.full(len(ell), np.nan), left, 1.0)

    def to_json(self):
        return {"type": "gencantor_set", "m": self.m, "a": self.a}


class Grill(GeometricSet):
    """``base x [0, 1]^extra_dims``."""

    def __init__(self, base: GeometricSet, extra_dims: int):
        if int(extra_dims) != extra_dims or extra_dims < 1:
            raise ConstructionError("grill needs extra_dims >= 1")
        if base.ambient != 1:
            raise ConstructionError("grill base must lie in R")
        self.base, self.extra_dims = base, int(extra_dims)
        self.ambient = 1 + self.extra_dims

    def __repr__(self):
        return f"Grill({self.base!r}, {self.extra_dims})"

    @property
    def dimension(self):
        return self.base.dimension + self.extra_dims

    def to_json(self):
        return {"type": "grill", "base": self.base.to_json(), "extra_dims": self.extra_dims}


class EmbeddedFlat(GeometricSet):
    """``base x {0}^zero_dims``."""

    def __init__(self, base: GeometricSet, zero_dims: int):
        if int(zero_dims) != zero_dims or zero_dims < 1:
            raise ConstructionError("embedding needs zero_dims >= 1")
        if isinstance(base, UnionSet):
            raise ConstructionError("embed the parts of a union separately")
        self.base, self.zero_dims = base, int(zero_dims)
        self.ambient = base.ambient + self.zero_dims

    def __repr__(self):
        return f"EmbeddedFlat({self.base!r}, {self.zero_dims})"

    @property
    def dimension(self):
        return self.base.dimension

    def to_json(self):
        return {"type": "flat", "base": self.base.to_json(), "zero_dims": self.zero_dims}


class UnionSet(GeometricSet):
    """Union of sets in the same R^N, translated along the first axis so their cores are ``spacing`` apart."""

    def __init__(self, parts, spacing: float = 1.0):
        parts = tuple(parts)
        if not parts:
            raise ConstructionError("union needs at least one part")
        if len({p.ambient for p in parts}) != 1:
            raise ConstructionError("all parts of a union must share the ambient dimension")
        if any(isinstance(p, UnionSet) for p in parts):
            raise ConstructionError("nested unions are not supported; flatten them")
        self.parts, self.spacing = parts, float(spacing)
        self.ambient = parts[0].ambient
        offs, x = [], 0.0
        for p in parts:
            offs.append(x)
            x += _factor(p)[0].extent + self.spacing
        self.offsets = tuple(offs)

    def __repr__(self):
        return f"UnionSet({list(self.parts)!r})"

    @property
    def dimension(self):
        return max(p.dimension for p in self.parts)

    def to_json(self):
        return {"type": "union", "parts": [p.to_json() for p in self.parts], "spacing": self.spacing,
                "offsets": list(self.offsets)}


def _factor(A: GeometricSet) -> tuple[_Core, int, int]:
    """(core, number of unit-interval factors, number of point factors)."""
    if isinstance(A, _Core):
        return A, 0, 0
    if isinstance(A, Grill):
        core, c, z = _factor(A.base)
        return core, c + A.extra_dims, z
    if isinstance(A, EmbeddedFlat):
        core, c, z = _factor(A.base)
        return core, c, z + A.zero_dims
    raise ConstructionError(f"cannot factor {A!r}")


def default_delta(A: GeometricSet) -> float:
    """The largest gap of the core(s), which exceeds half of it."""
    parts = A.parts if isinstance(A, UnionSet) else (A,)
    return max(_factor(p)[0].max_gap() for p in parts)


@dataclass(frozen=True)
class MCResult:
    value: complex
    stderr: float
    n_samples: int
    seed: int
    unsampled: float = 0.0  # largest share of a core's gap weight left out of the sampling

    def to_json(self):
        return {"re": self.value.real, "im": self.value.imag, "stderr": self.stderr,
                "n_samples": self.n_samples, "seed": self.seed, "unsampled": self.unsampled}


# ---------------------------------------------------------------------------
# closed forms


def _check_common(e: StringExpr, s: complex, delta: float, shift: int):
    if not delta > 0:
        raise ConstructionError("delta must be positive")
    if not delta > e.max_length / 2:
        raise ConstructionError(f"delta = {delta} must exceed half the largest length {e.max_length / 2}")
    if s == shift:
        raise ConstructionError(f"s = {shift} is a pole of the prefactor")
    D = exact_abscissa(e).value
    if not s.real > D + shift:
        raise OutsideHalfPlaneError(f"Re s = {s.real} must exceed {D + shift}")


def dzeta_line(e: StringExpr, s: complex, delta: float, tol: float = 1e-12) -> complex:
    """Distance zeta of the realization of ``e`` in R: ``2^(1-s)/s zeta(s) + 2 delta^s / s``."""
    return dzeta_line_bounded(e, s, delta, tol)[0]


def dzeta_line_bounded(e: StringExpr, s: complex, delta: float, tol: float = 1e-12) -> tuple[complex, float]:
    """:func:`dzeta_line` with an absolute error bound."""
    s = complex(s)
    _check_common(e, s, delta, 0)
    r = eval_zeta(e, s, tol)
    pre = cmath.exp((1 - s) * math.log(2)) / s
    strip = 2 * cmath.exp(s * math.log(delta)) / s
    v = pre * r.value + strip
    return v, abs(pre) * r.error_bound + 8 * EPS * (abs(pre * r.value) + abs(strip))


def _strip_term(s: complex, delta: float, N: int) -> complex:
    # the two slabs beside the end faces {0} x [0,1]^(N-1) and {a_1} x [0,1]^(N-1)
    t = s - N + 1
    return 2 * cmath.exp(t * math.log(delta)) / t


def dzeta_grill(base: StringExpr, N: int, s: complex, delta: float, mc_budget: int, seed: int = 0,
                tol: float = 1e-12) -> tuple[complex, float]:
    """Distance zeta of the grill ``A_L x [0,1]^(N-1)`` via the shift formula.

    For N = 2 this is ``2^(N-s)/(s-N+1) zeta_L(s-N+1) + zeta_{A_L x {0}}(s) + 2 delta^(s-N+1)/(s-N+1)``
    with the middle term estimated by Monte Carlo.  For N >= 3 the region next to
    the cube's lower-dimensional faces is not a neighborhood of ``A_L x {0}``, so the
    whole remainder beyond the exact first term is estimated instead.
    """
    s = complex(s)
    if int(N) != N or N < 2:
        raise ConstructionError("grill needs N >= 2")
    if not mc_budget > 0:
        raise ConstructionError("Monte Carlo budget must be positive")
    _check_common(base, s, delta, N - 1)
    t = s - N + 1
    z = eval_zeta(base, t, tol).value
    first = cmath.exp((N - s) * math.log(2)) / t * z
    R = Realization(base)
    if N == 2:
        mc = dzeta_monte_carlo(EmbeddedFlat(R, 1), s, delta, mc_budget, seed)
        return first + _strip_term(s, delta, N) + mc.value, mc.stderr
    mc = _monte_carlo(Grill(R, N - 1), s, delta, mc_budget, seed, exclude_slab=True)
    return first + mc.value, mc.stderr


def _F(h, delta):
    """Integral of sqrt(delta^2 - t^2) over [0, min(h, delta)]."""
    h = np.minimum(h, delta)
    return 0.5 * (h * np.sqrt(np.maximum(delta * delta - h * h, 0.0)) + delta * delta * np.arcsin(h / delta))


def neighborhood_volume(A: GeometricSet, delta: float, n_samples: int = 1_000_000, seed: int = 0) -> tuple[float, float]:
    """Lebesgue measure of ``A_delta`` with a standard error (0 for closed forms).

    Closed forms cover cores in R, their grills in R^2 and their embeddings in R^2.
    """
    if not delta > 0:
        raise ConstructionError("delta must be positive")
    if not isinstance(A, UnionSet):
        core, c, z = _factor(A)
        if c + z <= 1:
            runs = core.gap_runs(delta * 1e-12)
            mu, ell = runs.mu, runs.ell
            if c + z == 0:
                body = math.fsum(mu * np.minimum(ell, 2 * delta)) + min(runs.tail, 2 * delta)
                return body + 2 * delta, 0.0
            flat = math.fsum(4 * mu * _F(ell / 2, delta)) + 4 * float(_F(runs.tail / 2, delta)) + math.pi * delta**2
            if z == 1:
                return flat, 0.0
            # grill: the slab over [0, extent] plus the two end slabs, then the flat caps
            return core.extent + 2 * delta + flat, 0.0
    r = _monte_carlo(A, complex(A.ambient), delta, n_samples, seed)
    return r.value.real, r.stderr


# ---------------------------------------------------------------------------
# Monte Carlo


def _core_runs(core: _Core, q: float, delta: float):
    if isinstance(core, Realization):
        return core.gap_runs(delta * TAIL_FRACTION, q)
    return None


def _sample_core(core: _Core, runs, q: float, u: np.ndarray, rng: np.random.Generator, delta: float):
    """First coordinate for stratified uniforms ``u`` plus the importance weight.

    For realizations ``u`` picks a segment (outer margin, run of gaps or the
    leftover interval) with probability proportional to ``length^q`` per gap,
    ``q`` being how a gap's share of the integral scales with its length.
    Inside a gap the sample is pushed towards the nearer endpoint (offset
    ``(l/2) v^2``), which tames the ``d^(s-N)`` singularity.  The weight
    restores the uniform density.

    Also returns the distance to the core where it is known from the
    construction: a gap holds no point of the set, so the offset from its
    nearer endpoint is the distance, even when ``x`` itself cannot resolve a
    gap that small next to its position.  NaN marks samples needing a lookup.
    """
    if runs is None:
        M = core.extent + 2 * delta
        return -delta + u * M, np.full(len(u), M), np.full(len(u), np.nan)
    nr = len(runs.ell)
    seg_len = np.concatenate(([delta], runs.ell * runs.mu, [runs.tail, delta]))
    seg_w = np.concatenate(([delta**q], runs.mu * runs.ell**q, [runs.tail**q if runs.tail > 0 else 0.0, delta**q]))
    edges = np.cumsum(seg_w)
    pos = u * edges[-1]
    seg = np.minimum(np.searchsorted(edges, pos, side="right"), nr + 2)
    frac = np.clip((pos - (edges[seg] - seg_w[seg])) / seg_w[seg], 0.0, 1.0)
    v = rng.random(len(u))
    side = rng.random(len(u)) < 0.5
    w = seg_len[seg] * edges[-1] / seg_w[seg]
    x = np.empty(len(u))
    d = np.full(len(u), np.nan)
    a = seg == 0
    x[a] = -delta * v[a] ** 2
    d[a] = delta * v[a] ** 2
    w[a] *= 2 * v[a]
    b = seg == nr + 2
    x[b] = runs.extent + delta * v[b] ** 2
    d[b] = delta * v[b] ** 2
    w[b] *= 2 * v[b]
    t = seg == nr + 1
    x[t] = frac[t] * runs.tail
    g = (seg >= 1) & (seg <= nr)
    r = seg[g] - 1
    ell, mu = runs.ell[r], runs.mu[r]
    i = np.minimum(np.floor(frac[g] * mu), mu - 1)
    left = runs.lo[r] + (mu - 1 - i) * ell
    off = 0.5 * ell * v[g] ** 2
    x[g] = np.where(side[g], left + off, left + ell - off)
    d[g] = off
    w[g] *= 2 * v[g]
    return x, w, d


def _part_distance(core: _Core, runs, c: int, z: int, x, ys, known=None):
    d1 = _run_distance(runs, x) if runs is not None else core.distance(x)
    if known is not None:
        d1 = np.where(np.isnan(known), d1, known)
    d2 = d1**2
    for k in range(c):
        y = ys[:, k]
        d2 = d2 + np.maximum(np.maximum(-y, y - 1.0), 0.0) ** 2
    for k in range(c, c + z):
        d2 = d2 + ys[:, k] ** 2
    return np.sqrt(d2)


def _sample_part(core, runs, q, c, z, u, rng, delta):
    x, w, d1 = _sample_core(core, runs, q, u, rng, delta)
    ys = np.empty((len(u), c + z))
    if c:
        ys[:, :c] = -delta + rng.random((len(u), c)) * (1 + 2 * delta)
        w = w * (1 + 2 * delta) ** c
    if z:
        ys[:, c:] = -delta + rng.random((len(u), z)) * (2 * delta)
        w = w * (2 * delta) ** z
    return x, ys, w, d1


def _monte_carlo(A: GeometricSet, s: complex, delta: float, n_samples: int, seed: int,
                 exclude_slab: bool = False) -> MCResult:
    """Stratified estimate of the integral of ``d(x, A)^(s - N)`` over ``A_delta``.

    Union parts are sampled over their own neighborhoods; a point counted by
    several parts is weighted by one over their number, so overlaps are not
    double counted.  With ``exclude_slab`` the slab ``[0, a_1] x [0,1]^(N-1)``
    of a grill is left out.
    """
    if n_samples < 2:
        raise ConstructionError("need at least 2 samples")
    N = A.ambient
    parts = A.parts if isinstance(A, UnionSet) else (A,)
    offsets = A.offsets if isinstance(A, UnionSet) else (0.0,)
    factored = []
    for p in parts:
        core, c, z = _factor(p)
        q = min(1.0, complex(s).real - c)
        factored.append((core, _core_runs(core, q, delta), q, c, z))
    unsampled = max((f[1].missing for f in factored if f[1] is not None), default=0.0)
    if unsampled > UNSAMPLED_LIMIT:
        raise EstimateUnavailable(
            f"the sampled gaps miss {unsampled:.3g} of the weight at Re s = {complex(s).real}; move s right"
        )
    alpha = complex(s) - N
    per_part = max(2, n_samples // len(parts))
    strata = per_part // 2
    total = 0j
    var_re = var_im = 0.0
    root = np.random.SeedSequence(seed)
    for pi, part in enumerate(parts):
        core, runs, q, c, z = factored[pi]
        acc = 0j
        vr = vi = 0.0
        for ci, h0 in enumerate(range(0, strata, _CHUNK)):
            h = np.arange(h0, min(h0 + _CHUNK, strata))
            rng = np.random.default_rng(np.random.SeedSequence(root.entropy, spawn_key=(pi, ci)))
            u = (np.repeat(h, 2) + rng.random(2 * len(h))) / strata
            x, ys, w, d1 = _sample_part(core, runs, q, c, z, u, rng, delta)
            xg = x + offsets[pi]
            d = _part_distance(core, runs, c, z, x, ys, d1)
            inside = d < delta
            dmin, cover = d, inside.astype(float)
            for pj, other in enumerate(parts):
                if pj == pi:
                    continue
                co, cr, _, cc, cz = factored[pj]
                dj = _part_distance(co, cr, cc, cz, xg - offsets[pj], ys)
                dmin = np.minimum(dmin, dj)
                cover += dj < delta
            ok = inside & (dmin > 0)
            if exclude_slab:
                ok &= ~((x >= 0) & (x <= core.extent) & np.all((ys >= 0) & (ys <= 1), axis=1))
            f = np.zeros(len(x), dtype=complex)
            f[ok] = w[ok] * np.exp(alpha * np.log(dmin[ok])) / cover[ok]
            pairs = f.reshape(-1, 2)
            acc += pairs.sum()
            diff = pairs[:, 0] - pairs[:, 1]
            # within-stratum variance of a pair mean is (f1 - f2)^2 / 4
            vr += float(np.sum(diff.real**2)) / 4
            vi += float(np.sum(diff.imag**2)) / 4
        total += acc / (2 * strata)
        var_re += vr / strata**2
        var_im += vi / strata**2
    return MCResult(complex(total), math.sqrt(var_re + var_im), 2 * strata * len(parts), int(seed), unsampled)


def dzeta_monte_carlo(A: GeometricSet, s: complex, delta: float, n_samples: int = 1_000_000, seed: int = 0) -> MCResult:
    """Monte Carlo estimate of ``zeta_A(s)``; deterministic for a fixed seed."""
    s = complex(s)
    if not delta > 0:
        raise ConstructionError("delta must be positive")
    if n_samples < 1000:
        raise ConstructionError("Monte Carlo needs at least 1000 samples")
    if not s.real > A.dimension:
        raise OutsideHalfPlaneError(f"Re s = {s.real} is not right of the dimension {A.dimension} of the set")
    return _monte_carlo(A, s, delta, n_samples, seed)


# ---------------------------------------------------------------------------
# singularities and the set constructor


def shift_lattices(lattices, k: int) -> tuple[list[SingularityLattice], list[complex]]:
    """Translate lattices by k; the extra point k appears when 0 was a singularity."""
    moved = [SingularityLattice(l.real_part + k, l.period, l.kind, l.order) for l in lattices]
    extra = [complex(k)] if any(l.real_part == 0 for l in lattices) else []
    return moved, extra


def set_lattices(A: GeometricSet, max_parts: int = 64) -> tuple[list[SingularityLattice], list[complex]]:
    """Known singularity lattices of ``zeta_A`` and any isolated extra points."""
    if isinstance(A, UnionSet):
        lats, pts = [], []
        for p in A.parts:
            a, b = set_lattices(p, max_parts)
            lats += a
            pts += b
        return lats, pts
    core, c, _ = _factor(A)
    if isinstance(core, Realization):
        base = known_lattices(core.of, max_parts)
    else:
        base = [singularity_lattice(core.params, 1)]
    return shift_lattices(base, c) if c else (base, [])


def _lift(core: GeometricSet, cubes: int, points: int) -> GeometricSet:
    A = Grill(core, cubes) if cubes else core
    return EmbeddedFlat(A, points) if points else A


def construct_set(d_inf: float, d1: float, d: float, N: int, integer_offset: float | None = None,
                  m: int = 2, **schedule) -> GeometricSet:
    """A bounded set in R^N whose distance zeta has abscissae (d_inf, d1, d).

    One to three parts: the grill of a prescribed string (embedded flat), a
    grill over an infinite-order realization with fractional dimension
    ``d1 - floor(d1)``, and a grill over a generalized Cantor set with
    fractional dimension ``d - floor(d)``.  Integer ``d1`` or ``d`` cannot be
    realized this way; pass ``integer_offset`` to aim at ``value - offset``
    instead.
    """
    if int(N) != N or N < 1:
        raise ConstructionError("N must be a positive integer")
    if not (0 <= d_inf < d1 <= d < N):
        raise ConstructionError(f"need 0 <= d_inf < d1 <= d < N, got ({d_inf}, {d1}, {d}) with N = {N}")
    if N == 1:
        return Realization(construct(d_inf, d1, d, **schedule).expr)
    if d_inf >= N - 1:
        k = N - 1
        return Grill(Realization(construct(d_inf - k, d1 - k, d - k, **schedule).expr), k)

    n1 = math.floor(d_inf) + 1
    d1p = min(d1, 0.5 * (d_inf + n1))
    k = n1 - 1
    core = Realization(construct(d_inf - k, d1p - k, d1p - k, **schedule).expr)
    a2 = _lift(core, k, N - n1)

    def frac_target(x, name):
        f = x - math.floor(x)
        if f == 0:
            if integer_offset is None:
                raise ConstructionError(f"{name} = {x} is an integer; pass integer_offset to target {name} - offset")
            if not 0 < integer_offset < 1:
                raise ConstructionError("integer_offset must lie in (0, 1)")
            x = x - integer_offset
            f = x - math.floor(x)
        return math.floor(x), f

    fl1, f1 = frac_target(d1, "d1")
    p1 = CantorParams.from_dimension(m, f1)
    B = _lift(Realization(InfiniteOrder(p1.m, p1.a, p1.log_inv_a)), fl1, N - 1 - fl1)
    fl, f = frac_target(d, "d")
    p = CantorParams.from_dimension(m, f)
    C = _lift(GenCantorSet(p.m, p.a), fl, N - 1 - fl)
    return UnionSet((a2, B, C))


def abscissa_probe(A: GeometricSet, sigmas, delta: float, n_samples: int = 200_000, seed: int = 0,
                   grid: int = 400) -> float:
    """Locate the abscissa of ``zeta_A`` from Monte Carlo values at real ``sigmas``.

    Fits ``log zeta_A(sigma) = c - p log(sigma - D)`` and returns the D (below
    every sigma) with the smallest residual.  A pole gives an exact fit; faster
    blow-up still pulls the best D towards the singularity.
    """
    sig = np.sort(np.asarray(sigmas, dtype=float))
    if len(sig) < 4:
        raise ConstructionError("need at least 4 sample abscissae")
    vals = [_monte_carlo(A, complex(x), delta, n_samples, seed + i).value.real for i, x in enumerate(sig)]
    y = np.log(vals)
    lo = sig[0] - 4 * (sig[-1] - sig[0])
    best, best_res = math.nan, math.inf
    for D in np.linspace(lo, sig[0], grid, endpoint=False):
        x = np.log(sig - D)
        coef = np.polyfit(x, y, 1)
        res = float(np.sum((np.polyval(coef, x) - y) ** 2))
        if coef[0] < 0 and res < best_res:
            best, best_res = float(D), res
    return best
