"""Evaluation of geometric zeta functions with certified truncation bounds.

All evaluators are vectorized over an array of points ``s``.  Internally each
node returns a value array, an absolute error-bound array and a status array;
the public scalar entry point :func:`eval_zeta` turns nonzero statuses into
exceptions.

Status codes: 0 ok, 1 singular (within the guard of a known singularity),
2 outside the half-plane where the expression can be summed, 3 no certified
bound within the work limits, 4 magnitude beyond double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .cantor import SINGULAR_DENOMINATOR, CantorParams, SingularityLattice, one_minus_mas, singularity_lattice
from .errors import (
    ConstructionError,
    OutsideHalfPlaneError,
    SingularityError,
    UncertifiedError,
    ValueOverflowError,
)
from .strings import (
    Explicit,
    GenCantor,
    InfiniteOrder,
    Power,
    Scale,
    SelfSimilar,
    SeriesLift,
    StringExpr,
    Tensor,
    Union,
    WeightedUnion,
)

__all__ = [
    "EvalResult",
    "EpsilonCertificate",
    "eval_zeta",
    "eval_zeta_array",
    "eval_infinite_order",
    "epsilon_bound",
    "known_lattices",
    "inverse_factorial_series",
    "DEFAULT_GUARD",
    "OK",
    "SINGULAR",
    "OUTSIDE",
    "UNCERTIFIED",
    "OVERFLOW",
]

OK, SINGULAR, OUTSIDE, UNCERTIFIED, OVERFLOW = 0, 1, 2, 3, 4
DEFAULT_GUARD = 1e-6
EPS = np.finfo(float).eps
LOG_MAX = 700.0
MAX_SERIES_TERMS = 200_000
MAX_PARTS = 4000


@dataclass(frozen=True)
class EvalResult:
    value: complex
    error_bound: float
    terms_used: int
    certified: bool = True


class _R:
    """Per-point evaluation record."""

    __slots__ = ("v", "b", "st", "terms")

    def __init__(self, v, b, st, terms=0):
        self.v, self.b, self.st, self.terms = v, b, st, terms

    def merge_status(self, st):
        self.st = np.where(self.st == OK, st, self.st)
        return self

    def finish(self):
        bad = self.st != OK
        self.v = np.where(bad, np.nan + 0j, self.v)
        self.b = np.where(bad, np.inf, self.b)
        return self


def _zeros(n, dtype=float):
    return np.zeros(n, dtype=dtype)


def _as_tol(tol, n):
    return np.broadcast_to(np.asarray(tol, dtype=float), (n,)).copy()


# ---------------------------------------------------------------------------
# atoms


def _explicit(e: Explicit, s):
    logs = np.array([math.log(t.length) for t in e.terms])
    mult = np.array([float(t.multiplicity) for t in e.terms])
    powers = np.exp(np.outer(s, logs))
    v = powers @ mult
    mag = np.abs(powers) * (4.0 + np.abs(np.outer(s, logs)))
    b = EPS * (mag @ mult)
    return _R(v, b, _zeros(len(s), int), int(mult.sum()))


def _lattice_distance(m, lia, s):
    lat = SingularityLattice(math.log(m) / lia, 2 * math.pi / lia)
    return lat.distance(s)


def _gencantor(m, lia, s, guard, n=1):
    d = one_minus_mas(m, lia, s)
    st = _zeros(len(s), int)
    st[(np.abs(d) < SINGULAR_DENOMINATOR) | (_lattice_distance(m, lia, s) < guard)] = SINGULAR
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = (1.0 / d) ** n
        w = math.log(m) - s * lia
        rel_d = EPS * (4.0 + np.abs(w)) * np.abs(1.0 - d) / np.abs(d)
        b = np.abs(v) * ((1.0 + rel_d) ** n - 1.0 + 4 * n * EPS)
    return _R(v, b, st, 1).finish()


def _selfsimilar(e: SelfSimilar, s, guard):
    ratios = e.ratios
    if len(set(ratios)) == 1:
        r = ratios[0]
        return _gencantor(len(ratios), -math.log(r), s, guard)
    logs = np.array([math.log(r) for r in ratios])
    pw = np.exp(np.outer(s, logs))
    d = 1.0 - pw.sum(axis=1)
    dd = -(pw * logs).sum(axis=1)  # derivative of d
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.abs(d) < np.maximum(SINGULAR_DENOMINATOR, guard * np.abs(dd))
        v = 1.0 / d
        err_d = EPS * (np.abs(pw) * (4.0 + np.abs(np.outer(s, logs)))).sum(axis=1)
        b = np.abs(v) * (err_d / np.abs(d) + 4 * EPS)
    st = np.where(near, SINGULAR, OK)
    return _R(v, b, st, len(ratios)).finish()


def inverse_factorial_series(x, sigma, tol, nmax=MAX_SERIES_TERMS):
    """Upper bound for ``sum_{n>=1} x^n / (n!)^sigma`` (arrays, sigma > 0).

    ``tol`` is relative.  Returns (value, ok); ``ok`` is False where the sum
    would overflow or needs more than ``nmax`` terms.
    """
    x = np.asarray(x, dtype=float)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), x.shape)
    out = np.full(x.shape, np.inf)
    ok = _peak_ok(x, sigma, nmax)
    idx = np.nonzero(ok)[0]
    lx, sg = np.log(x[idx]), sigma[idx]
    acc = np.zeros(len(idx))
    n0, block = 1, 16
    while len(idx):
        block = max(4, min(block, 4096, (1 << 22) // len(idx)))
        ns = np.arange(n0, n0 + block, dtype=float)
        lg = gammaln(ns + 1.0)
        acc += np.exp(ns * lx[:, None] - sg[:, None] * lg).sum(axis=1)
        n_last = n0 + block - 1
        q = np.exp(lx - sg * math.log(n_last + 2))
        nxt = np.exp((n_last + 1) * lx - sg * gammaln(n_last + 2.0))
        with np.errstate(divide="ignore"):
            tail = np.where(q < 1, nxt / (1 - q), np.inf)
        done = (tail <= tol * acc) | (n_last >= nmax)
        if done.any():
            out[idx[done]] = acc[done] * (1 + 16 * EPS * math.log2(n_last + 1)) + tail[done]
            keep = ~done
            idx, lx, sg, acc = idx[keep], lx[keep], sg[keep], acc[keep]
        n0 = n_last + 1
        block *= 2
    return out, ok & np.isfinite(out)


def _peak_ok(x, sigma, nmax):
    """The largest term of sum x^n/(n!)^sigma fits in double range and is reached before nmax."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        nstar = np.where(x > 0, x ** (1.0 / sigma), 0.0)
        nn = np.clip(np.floor(nstar), 1, None)
        logpeak = np.maximum(
            nn * np.log(np.maximum(x, 1e-300)) - sigma * gammaln(nn + 1),
            (nn + 1) * np.log(np.maximum(x, 1e-300)) - sigma * gammaln(nn + 2),
        )
    return (sigma > 0) & (nstar < nmax / 2) & (logpeak < LOG_MAX)


def _infinite_order(m, lia, s, tol, guard):
    n_pts = len(s)
    sig = s.real
    st = _zeros(n_pts, int)
    st[sig <= 0] = OUTSIDE
    d = one_minus_mas(m, lia, s)
    near = (np.abs(d) < SINGULAR_DENOMINATOR) | (_lattice_distance(m, lia, s) < guard)
    st[(st == OK) & near] = SINGULAR
    v = np.full(n_pts, np.nan + 0j)
    b = np.full(n_pts, np.inf)
    ok = st == OK
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(ok, 1.0 / d, 1.0)
        w_rel = EPS * (4.0 + np.abs(math.log(m) - s * lia)) * np.abs(1.0 - d) / np.abs(d)
    aw = np.abs(w) * (1.0 + np.where(ok, w_rel, 0.0) + 1e-15)
    peak = _peak_ok(aw, np.where(ok, sig, 1.0), MAX_SERIES_TERMS)
    st[ok & ~peak] = OVERFLOW
    tol = _as_tol(tol, n_pts)

    # terms w^n / (n!)^s are formed in blocks of n from their logarithms
    idx = np.nonzero(st == OK)[0]
    logw, lhi, llo = np.log(w[idx]), np.log(aw[idx]), np.log(np.abs(w[idx]))
    ss, sg, tl = s[idx], sig[idx], tol[idx]
    acc = np.zeros(len(idx), complex)
    hi = np.zeros(len(idx))
    lo = np.zeros(len(idx))
    rnd = np.zeros(len(idx))
    n0, block = 1, 16
    terms_used = 0
    while len(idx):
        block = max(4, min(block, 4096, (1 << 22) // len(idx)))
        ns = np.arange(n0, n0 + block, dtype=float)
        lg = gammaln(ns + 1.0)
        logt = ns * logw[:, None] - ss[:, None] * lg
        acc += np.exp(logt).sum(axis=1)
        bh = np.exp(ns * lhi[:, None] - sg[:, None] * lg)
        hi += bh.sum(axis=1)
        lo += np.exp(ns * llo[:, None] - sg[:, None] * lg).sum(axis=1)
        rnd += EPS * ((np.abs(logt) + 4.0) * bh).sum(axis=1)
        n_last = n0 + block - 1
        q = np.exp(lhi - sg * math.log(n_last + 2))
        nxt = np.exp((n_last + 1) * lhi - sg * gammaln(n_last + 2.0))
        with np.errstate(divide="ignore"):
            tail = np.where(q < 1, nxt / (1 - q), np.inf)
        # hi - lo bounds the effect of the rounding in w itself
        bound = tail + rnd + EPS * math.log2(n_last + 1) * hi + np.maximum(hi - lo, 0.0)
        # once the tail is below the rounding floor more terms cannot help
        done = (bound <= tl) | (tail <= EPS * hi) | (n_last >= MAX_SERIES_TERMS)
        if done.any():
            sel = idx[done]
            v[sel] = acc[done]
            b[sel] = bound[done]
            terms_used = max(terms_used, n_last)
            keep = ~done
            idx, logw, lhi, llo, ss, sg, tl = idx[keep], logw[keep], lhi[keep], llo[keep], ss[keep], sg[keep], tl[keep]
            acc, hi, lo, rnd = acc[keep], hi[keep], lo[keep], rnd[keep]
        n0 = n_last + 1
        block *= 2
    st[np.isinf(b) & (st == OK)] = UNCERTIFIED
    return _R(v, b, st, terms_used).finish()


# ---------------------------------------------------------------------------
# combinators


def _scale_result(r: _R, gamma, s):
    g = np.exp(s * math.log(gamma))
    r.v = g * r.v
    r.b = np.abs(g) * r.b + 4 * EPS * np.abs(r.v) * (1.0 + np.abs(s * math.log(gamma)))
    return r


def _product(results):
    v = np.ones(len(results[0].v), complex)
    hi = np.ones(len(v))
    lo = np.ones(len(v))
    st = np.zeros(len(v), int)
    for r in results:
        v = v * r.v
        hi = hi * (np.abs(r.v) + r.b)
        lo = lo * np.abs(r.v)
        st = np.where(st == OK, r.st, st)
    b = hi - lo + 4 * len(results) * EPS * np.abs(v)
    return _R(v, b, st, max(r.terms for r in results)).finish()


def _union(e: Union, s, tol, guard):
    k = len(e.parts)
    rs = [_evaluate(p, s, tol / k, guard) for p in e.parts]
    v = sum(r.v for r in rs)
    b = sum(r.b for r in rs) + k * EPS * sum(np.abs(r.v) for r in rs)
    out = _R(v, b, rs[0].st.copy(), sum(r.terms for r in rs))
    for r in rs[1:]:
        out.merge_status(r.st)
    return out.finish()


def _weighted_union(e: WeightedUnion, s, tol, guard):
    fam = e.family
    n_pts = len(s)
    sig = s.real
    tol = _as_tol(tol, n_pts)
    v = np.zeros(n_pts, complex)
    b = np.zeros(n_pts)
    st = np.where(fam.outside(s), OUTSIDE, OK)
    terms = 0
    finite = fam.count is not None
    limit = fam.count if finite else MAX_PARTS
    active = st == OK
    for k in range(1, limit + 1):
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        w, part = fam.part(k)
        if w == 0.0:
            break  # weights underflow; the points left active stay uncertified
        wsig = w ** sig[idx]
        share = 2.0 ** -(k + 1) if not finite else 1.0 / (2 * fam.count)
        r = _evaluate(part, s[idx], tol[idx] * share / wsig, guard)
        r = _scale_result(r, w, s[idx])
        v[idx] += r.v
        b[idx] += r.b
        st[idx] = np.where(st[idx] == OK, r.st, st[idx])
        terms += r.terms
        still = st[idx] == OK
        if finite:
            continue
        tail = fam.zeta_tail(k, s[idx], tol[idx] / 2)
        finished = tail <= tol[idx] / 2
        b[idx[finished]] += tail[finished]
        active[idx[finished | ~still]] = False
    if not finite:
        st[active & (st == OK)] = UNCERTIFIED
    b += EPS * np.abs(v)
    return _R(v, b, st, terms).finish()


def _series_lift(e: SeriesLift, s, tol, guard):
    fam = e.coeffs
    n_pts = len(s)
    sig = s.real
    tol = _as_tol(tol, n_pts)
    inner = _evaluate(e.inner, s, tol * 1e-3, guard)
    st = inner.st.copy()
    st[(st == OK) & (sig <= 0)] = OUTSIDE
    v = np.full(n_pts, np.nan + 0j)
    b = np.full(n_pts, np.inf)

    idx = np.nonzero(st == OK)[0]
    z = inner.v[idx]
    az = np.abs(z)
    X = az + inner.b[idx] + 1e-300
    ss, sg, tl = s[idx], sig[idx], tol[idx]
    acc = np.zeros(len(idx), complex)
    prop = np.zeros(len(idx))
    babs = np.zeros(len(idx))
    zp = np.ones(len(idx), complex)
    n_prev = 0
    terms_used = 0
    for count, n in enumerate(fam.indices()):
        if not len(idx):
            break
        zp = zp * z ** (n - n_prev) if n > n_prev else zp
        n_prev = n
        c = fam.coefficient(n)
        lc = math.log(c)
        logb = sg * lc + n * np.log(X)
        over = logb > LOG_MAX
        term = np.exp(ss * lc) * zp
        bX = np.exp(logb)
        acc += term
        babs += np.abs(term)
        prop += bX - np.exp(sg * lc) * az**n
        n1 = n + fam.step
        c1 = fam.coefficient(n1)
        q = np.array([fam.ratio(n1, float(g), float(x)) for g, x in zip(sg, X)])
        with np.errstate(over="ignore", divide="ignore"):
            nxt = np.exp(sg * math.log(c1) + n1 * np.log(X)) if c1 > 0 else np.zeros(len(idx))
            tail = np.where(q < 1, nxt / (1 - q), np.inf)
        rnd = 4 * (n + 1) * EPS * babs
        # below the rounding floor more terms cannot tighten the bound
        done = (tail + rnd <= tl / 2) | (tail <= EPS * babs)
        failed = over | (count >= MAX_SERIES_TERMS)
        if (done | failed).any():
            fin = done & ~failed
            v[idx[fin]] = acc[fin]
            b[idx[fin]] = tail[fin] + rnd[fin] + prop[fin]
            st[idx[failed]] = OVERFLOW
            terms_used = max(terms_used, count + 1)
            keep = ~(done | failed)
            idx, z, az, X, ss, sg, tl = idx[keep], z[keep], az[keep], X[keep], ss[keep], sg[keep], tl[keep]
            acc, prop, babs, zp = acc[keep], prop[keep], babs[keep], zp[keep]
    return _R(v, b, st, terms_used + inner.terms).finish()


def _evaluate(e: StringExpr, s, tol, guard) -> _R:
    if isinstance(e, Explicit):
        return _explicit(e, s)
    if isinstance(e, GenCantor):
        return _gencantor(e.m, e.log_inv_a, s, guard)
    if isinstance(e, SelfSimilar):
        return _selfsimilar(e, s, guard)
    if isinstance(e, InfiniteOrder):
        return _infinite_order(e.m, e.log_inv_a, s, tol, guard)
    if isinstance(e, Power):
        if isinstance(e.base, GenCantor):
            return _gencantor(e.base.m, e.base.log_inv_a, s, guard, e.n)
        r = _evaluate(e.base, s, _power_tol(tol, e.n), guard)
        return _product([r] * e.n)
    if isinstance(e, Tensor):
        k = len(e.parts)
        return _product([_evaluate(p, s, _power_tol(tol, k), guard) for p in e.parts])
    if isinstance(e, Scale):
        sig = s.real
        r = _evaluate(e.inner, s, np.asarray(tol) / e.gamma**sig, guard)
        return _scale_result(r, e.gamma, s)
    if isinstance(e, Union):
        return _union(e, s, tol, guard)
    if isinstance(e, WeightedUnion):
        return _weighted_union(e, s, tol, guard)
    if isinstance(e, SeriesLift):
        return _series_lift(e, s, tol, guard)
    raise TypeError(f"not a string expression: {e!r}")


def _power_tol(tol, n):
    # factors are typically O(1) or larger; a crude split that the retry loop corrects
    return np.asarray(tol) / (4.0 * n)


# ---------------------------------------------------------------------------
# public API


def eval_zeta_array(e: StringExpr, s, tol: float = 1e-10, guard: float = DEFAULT_GUARD):
    """Vectorized evaluation: returns ``(values, bounds, statuses)`` arrays."""
    s = np.atleast_1d(np.asarray(s, dtype=complex)).ravel()
    r = _evaluate(e, s, _as_tol(tol, len(s)), guard)
    return r.v, r.b, r.st


def known_lattices(e: StringExpr, max_parts: int = 64, re_min: float | None = None) -> list[SingularityLattice]:
    """Singularity lattices of the closed-form atoms inside ``e``.

    Infinite families contribute ``max_parts`` parts, or, when ``re_min`` is
    given and the family can list them, every part with a line right of it.
    """
    out: list[SingularityLattice] = []

    def walk(x, order=1):
        if isinstance(x, GenCantor):
            out.append(singularity_lattice(CantorParams.of(x), order))
        elif isinstance(x, InfiniteOrder):
            out.append(singularity_lattice(CantorParams.of(x), math.inf))
        elif isinstance(x, SelfSimilar) and len(set(x.ratios)) == 1:
            out.append(singularity_lattice(CantorParams(len(x.ratios), x.ratios[0]), order))
        elif isinstance(x, Power):
            walk(x.base, order * x.n)
        elif isinstance(x, (Tensor, Union)):
            for p in x.parts:
                walk(p, order)
        elif isinstance(x, Scale):
            walk(x.inner, order)
        elif isinstance(x, WeightedUnion):
            fam = x.family
            if fam.count is None and re_min is not None and hasattr(fam, "lines_right_of"):
                ks = list(fam.lines_right_of(re_min))
            else:
                ks = range(1, (fam.count or max_parts) + 1)
            for k in ks:
                walk(fam.part(k)[1], order)
        elif isinstance(x, SeriesLift):
            walk(x.inner, order)

    walk(e)
    return out


def _raise_for(e, s, status, guard):
    if status == SINGULAR:
        best = None
        for lat in known_lattices(e):
            p = lat.nearest(s)
            if best is None or abs(p - s) < abs(best[0] - s):
                best = (p, lat)
        nearest, lat = best if best else (None, None)
        raise SingularityError(
            f"s = {s} is within {guard} of a singularity" + (f" (nearest {nearest})" if best else ""),
            point=s,
            nearest=nearest,
            lattice=lat,
        )
    if status == OUTSIDE:
        raise OutsideHalfPlaneError(f"s = {s} lies outside the half-plane where the series can be summed")
    if status == OVERFLOW:
        raise ValueOverflowError(f"|zeta(s)| at s = {s} exceeds double range")
    raise UncertifiedError(f"no certified truncation bound at s = {s}")


def eval_zeta(e: StringExpr, s: complex, tol: float = 1e-10, guard: float = DEFAULT_GUARD) -> EvalResult:
    """Evaluate zeta_e(s) with an absolute error bound.

    The tolerance is re-tightened up to three times when the reported bound
    exceeds it (split heuristics in products can be too optimistic).
    """
    if not tol > 0:
        raise ConstructionError("tol must be positive")
    s = complex(s)
    cur = tol
    r = None
    for _ in range(4):
        prev = r
        r = _evaluate(e, np.array([s]), np.array([cur]), guard)
        if r.st[0] != OK:
            _raise_for(e, s, int(r.st[0]), guard)
        if r.b[0] <= tol:
            break
        if prev is not None and r.b[0] > 0.5 * prev.b[0]:
            # the bound is dominated by rounding, not truncation
            break
        cur /= 100.0
    return EvalResult(complex(r.v[0]), float(r.b[0]), int(r.terms), True)


def eval_infinite_order(params: CantorParams, s: complex, tol: float = 1e-10, guard: float = DEFAULT_GUARD) -> EvalResult:
    """zeta of the infinite-order string, sum over n of (1 - m a^s)^(-n) / (n!)^s."""
    return eval_zeta(InfiniteOrder(params.m, params.a, params.log_inv_a), s, tol, guard)


# ---------------------------------------------------------------------------
# epsilon certificates for the constructed families


@dataclass(frozen=True)
class EpsilonCertificate:
    """``|1 - m_k a_k^s| >= epsilon`` for every s in the closed disk and every covered k."""

    center: complex
    radius: float
    epsilon: float
    case: str
    covered: str = "all k >= 1"

    def to_json(self):
        return {
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "epsilon": self.epsilon,
            "case": self.case,
            "covered": self.covered,
        }


def _grid_min(m, lia, center, radius, grid=64, rounds=4):
    """Minimum of |1 - m a^s| over the closed disk: grid search plus local refinement."""
    t = np.linspace(-1.0, 1.0, grid)
    X, Y = np.meshgrid(t, t)
    inside = X**2 + Y**2 <= 1.0
    pts = center + radius * (X[inside] + 1j * Y[inside])
    # include the boundary circle, where the minimum of a harmonic-like modulus sits
    ang = np.linspace(0, 2 * np.pi, 4 * grid, endpoint=False)
    pts = np.concatenate([pts, center + radius * np.exp(1j * ang)])
    vals = np.abs(one_minus_mas(m, lia, pts))
    i = int(np.argmin(vals))
    best, best_pt = vals[i], pts[i]
    h = 2.0 * radius / (grid - 1)
    for _ in range(rounds):
        loc = np.linspace(-h, h, 21)
        LX, LY = np.meshgrid(loc, loc)
        cand = best_pt + LX.ravel() + 1j * LY.ravel()
        cand = cand[np.abs(cand - center) <= radius]
        if len(cand):
            cv = np.abs(one_minus_mas(m, lia, cand))
            j = int(np.argmin(cv))
            if cv[j] < best:
                best, best_pt = cv[j], cand[j]
        h /= 10.0
    return float(best)


def epsilon_bound(family, center: complex, radius: float, grid: int = 64) -> EpsilonCertificate:
    """Lower bound for ``|1 - m_k a_k^s|`` over a disk, uniformly in k.

    ``family`` supplies ``m(k)``, ``log_inv_a(k)``, ``D(k)`` for k >= 1, the
    limit ``d_inf`` and an optional finite ``count``.  The disk must lie right
    of the barrier, meet at most one line ``Re s = D_k`` and avoid the lattice.
    """
    center = complex(center)
    if not radius > 0:
        raise ConstructionError("radius must be positive")
    lo, hi = center.real - radius, center.real + radius
    if lo <= family.d_inf:
        raise ConstructionError("disk reaches the barrier line; infinitely many lines meet it")

    def eps_right(k, sigma):
        # Re s >= sigma > D_k: |m a^s| = m^(1 - sigma/D_k) < 1
        return -math.expm1((1.0 - sigma / family.D(k)) * math.log(family.m(k)))

    def eps_left(k, sigma):
        # Re s <= sigma < D_k: |m a^s| > 1
        return math.expm1((1.0 - sigma / family.D(k)) * math.log(family.m(k)))

    # lines met by the disk and the lines strictly to its right
    right, hit = [], []
    k = 1
    while family.count is None or k <= family.count:
        dk = family.D(k)
        if dk < lo:
            break
        (hit if dk <= hi else right).append(k)
        k += 1
    first_left = k  # smallest k with D_k < lo (may exceed count)
    if len(hit) > 1:
        raise ConstructionError(f"disk meets {len(hit)} singularity lines")

    cands = []
    if family.count is None or first_left <= family.count:
        cands.append((eps_right(first_left, lo), "a2"))
    if right:
        cands.append((min(eps_left(j, hi) for j in right), "a1"))
    if hit:
        k0 = hit[0]
        lat = SingularityLattice(family.D(k0), 2 * math.pi / family.log_inv_a(k0))
        if float(lat.distance(center)) <= radius:
            raise SingularityError("disk contains a singularity", point=center, nearest=lat.nearest(center), lattice=lat)
        g = 0.9 * _grid_min(family.m(k0), family.log_inv_a(k0), center, radius, grid)
        cands.append((g, "b"))
    if not hit and not right:
        eps, tag = cands[0][0], "c"
    else:
        eps, tag = min(cands)
        if hit:
            tag = "b"
    if not eps > 0:
        raise SingularityError("no positive epsilon on this disk", point=center)
    return EpsilonCertificate(center, float(radius), float(eps), tag)
