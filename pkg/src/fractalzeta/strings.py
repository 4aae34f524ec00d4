"""Symbolic algebra of bounded fractal strings.

A bounded fractal string is a nonincreasing sequence of positive lengths with
finite sum.  Here strings are represented as immutable expression trees whose
leaves are closed-form atoms (finite lists, self-similar strings, generalized
Cantor strings) and whose inner nodes are the semiring operations: disjoint
union (``+``), tensor product (``*`` between strings), scaling (``*`` by a
positive number), tensor powers (``**``) and power-series lifts ``F(L)``.

The length multiset of any expression can be streamed lazily in
nonincreasing order with :func:`enumerate_lengths`.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import count as _count
from typing import Callable, Iterator, Sequence

from .errors import ConstructionError

__all__ = [
    "LengthTerm",
    "StringExpr",
    "Explicit",
    "SelfSimilar",
    "GenCantor",
    "Power",
    "Tensor",
    "InfiniteOrder",
    "Scale",
    "Union",
    "WeightedUnion",
    "SeriesLift",
    "PartFamily",
    "FiniteFamily",
    "CoefficientFamily",
    "EXP",
    "EXP_MINUS_ONE",
    "GEOMETRIC",
    "LOG",
    "COSH",
    "SINH",
    "MaxTerms",
    "MinLength",
    "MaxDistinct",
    "UNIT",
    "cantor_string",
    "total_length",
    "max_length",
    "enumerate_lengths",
    "scale",
    "lift",
    "to_json",
    "from_json",
]


# ---------------------------------------------------------------------------
# length terms and cutoffs


@dataclass(frozen=True)
class LengthTerm:
    """One length value together with its multiplicity."""

    length: float
    multiplicity: int = 1

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ConstructionError(f"length must be positive and finite, got {self.length!r}")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ConstructionError(f"multiplicity must be a positive integer, got {self.multiplicity!r}")


@dataclass(frozen=True)
class MaxTerms:
    """Stop after ``n`` individual lengths (multiplicities counted)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConstructionError("MaxTerms needs n >= 1")


@dataclass(frozen=True)
class MinLength:
    """Emit only lengths ``>= length``."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ConstructionError("MinLength cutoff must be positive")


@dataclass(frozen=True)
class MaxDistinct:
    """Stop after ``n`` distinct lengths (coalesced terms)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConstructionError("MaxDistinct needs n >= 1")


# ---------------------------------------------------------------------------
# coefficient families for power-series lifts


def _first_nonzero(first: int, step: int, n: int) -> int:
    if n <= first:
        return first
    return first + -(-(n - first) // step) * step


@dataclass(frozen=True, eq=False)
class CoefficientFamily:
    """Nonnegative power-series coefficients ``c_n`` with radius of convergence.

    ``ratio(n, sigma, x)`` must bound ``(c_{n'} / c_n)**sigma * x**(n' - n)``
    for every pair of consecutive nonzero indices ``n <= n' - step`` at or
    beyond ``n``; this certifies geometric decay of the tails.
    """

    name: str
    coefficient: Callable[[int], float]
    radius: float
    function: Callable[[float], float] | None
    ratio: Callable[[int, float, float], float]
    first: int = 0
    step: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise ConstructionError("radius of convergence must be positive")
        if self.first < 0 or self.step < 1:
            raise ConstructionError("bad coefficient support")

    def indices(self) -> Iterator[int]:
        n = self.first
        while True:
            if self.coefficient(n) > 0:
                yield n
            n += self.step

    def next_index(self, n: int) -> int:
        return _first_nonzero(self.first, self.step, n)

    def value(self, x: float) -> float:
        """F(x) for 0 <= x < radius."""
        if self.function is not None:
            return self.function(x)
        return _sum_series(self, x)

    @classmethod
    def custom(cls, coefficient, radius, ratio, function=None, first=0, step=1, name="custom"):
        return cls(name, coefficient, radius, function, ratio, first, step)

    def __repr__(self):
        return f"CoefficientFamily({self.name!r})"


def _sum_series(fam: CoefficientFamily, x: float, tol: float = 1e-17) -> float:
    total = 0.0
    for n in fam.indices():
        term = fam.coefficient(n) * x**n
        total += term
        nxt = n + fam.step
        q = fam.ratio(nxt, 1.0, x)
        if q < 1 and fam.coefficient(nxt) * x**nxt / (1 - q) <= tol * max(total, 1e-300):
            return total
        if n > 100000:
            raise ConstructionError(f"series {fam.name} does not converge at {x}")
    return total


def _inv_factorial(n: int) -> float:
    if n <= 170:
        return 1.0 / math.factorial(n)
    return math.exp(-math.lgamma(n + 1))


EXP = CoefficientFamily(
    "exp", _inv_factorial, math.inf, math.exp, lambda n, s, x: x * (n + 1) ** -s
)
EXP_MINUS_ONE = CoefficientFamily(
    "expm1",
    lambda n: _inv_factorial(n) if n >= 1 else 0.0,
    math.inf,
    math.expm1,
    lambda n, s, x: x * (n + 1) ** -s,
    first=1,
)
GEOMETRIC = CoefficientFamily(
    "geometric", lambda n: 1.0, 1.0, lambda x: 1.0 / (1.0 - x), lambda n, s, x: x
)
LOG = CoefficientFamily(
    "log",
    lambda n: 1.0 / n if n >= 1 else 0.0,
    1.0,
    lambda x: -math.log1p(-x),
    lambda n, s, x: x,
    first=1,
)
COSH = CoefficientFamily(
    "cosh",
    lambda n: _inv_factorial(n) if n % 2 == 0 else 0.0,
    math.inf,
    math.cosh,
    lambda n, s, x: x * x * ((n + 1) * (n + 2)) ** -s,
    step=2,
)
SINH = CoefficientFamily(
    "sinh",
    lambda n: _inv_factorial(n) if n % 2 == 1 else 0.0,
    math.inf,
    math.sinh,
    lambda n, s, x: x * x * ((n + 1) * (n + 2)) ** -s,
    first=1,
    step=2,
)

_FAMILIES = {f.name: f for f in (EXP, EXP_MINUS_ONE, GEOMETRIC, LOG, COSH, SINH)}


# ---------------------------------------------------------------------------
# expression tree


class StringExpr:
    """Base class of the expression tree.  Subclasses are frozen dataclasses."""

    def __add__(self, other):
        if not isinstance(other, StringExpr):
            return NotImplemented
        return Union((self, other))

    def __mul__(self, other):
        if isinstance(other, StringExpr):
            return Tensor((self, other))
        if isinstance(other, (int, float)):
            return Scale(float(other), self)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n):
        return Power(self, n)

    @cached_property
    def total_length(self) -> float:
        """|e|_1; ``inf`` when it exceeds double range."""
        try:
            return _total_length(self)
        except OverflowError:
            return math.inf

    @cached_property
    def max_length(self) -> float:
        return _max_length(self)


def _check_ratio_parameters(m, a, log_inv_a):
    if int(m) != m or m < 2:
        raise ConstructionError(f"m must be an integer >= 2, got {m!r}")
    if log_inv_a is None:
        if not (0 < a < 1.0 / m):
            raise ConstructionError(f"a must lie in (0, 1/m) = (0, {1.0 / m}), got {a!r}")
        return -math.log(a)
    if not log_inv_a > math.log(m):
        raise ConstructionError("need m * a < 1")
    return float(log_inv_a)


@dataclass(frozen=True)
class Explicit(StringExpr):
    """A finite string given by its length terms."""

    terms: tuple[LengthTerm, ...]

    def __post_init__(self):
        terms = tuple(t if isinstance(t, LengthTerm) else LengthTerm(*t) for t in self.terms)
        if not terms:
            raise ConstructionError("Explicit string needs at least one length")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *lengths: float) -> "Explicit":
        return cls(tuple(LengthTerm(float(x)) for x in lengths))


@dataclass(frozen=True)
class SelfSimilar(StringExpr):
    """Self-similar string with scaling ratios ``r_1, ..., r_m``, sum < 1.

    Its lengths are all products ``r_{i_1} ... r_{i_k}`` over words (k >= 0).
    """

    ratios: tuple[float, ...]

    def __post_init__(self):
        ratios = tuple(float(r) for r in self.ratios)
        if not ratios or any(not 0 < r < 1 for r in ratios) or math.fsum(ratios) >= 1:
            raise ConstructionError(f"self-similar ratios must be in (0,1) with sum < 1, got {ratios}")
        object.__setattr__(self, "ratios", ratios)


@dataclass(frozen=True)
class GenCantor(StringExpr):
    """Generalized Cantor string: ``m`` equal ratios ``a`` (lengths ``a**j`` times ``m**j``).

    ``log_inv_a`` may be supplied instead of a meaningful ``a`` when ``a``
    underflows; it is the value of ``log(1/a)`` used in every evaluation.
    """

    m: int
    a: float
    log_inv_a: float | None = field(default=None, compare=False)

    def __post_init__(self):
        lia = _check_ratio_parameters(self.m, self.a, self.log_inv_a)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "log_inv_a", lia)
        object.__setattr__(self, "a", math.exp(-lia) if self.a is None else float(self.a))

    @property
    def dimension(self) -> float:
        return math.log(self.m) / self.log_inv_a


@dataclass(frozen=True)
class InfiniteOrder(StringExpr):
    """Generalized Cantor string of infinite order: union over n of (1/n!) * GenCantor(m, a)**n."""

    m: int
    a: float
    log_inv_a: float | None = field(default=None, compare=False)

    def __post_init__(self):
        lia = _check_ratio_parameters(self.m, self.a, self.log_inv_a)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "log_inv_a", lia)
        object.__setattr__(self, "a", math.exp(-lia) if self.a is None else float(self.a))

    @property
    def dimension(self) -> float:
        return math.log(self.m) / self.log_inv_a

    @property
    def atom(self) -> GenCantor:
        return GenCantor(self.m, self.a, self.log_inv_a)


@dataclass(frozen=True)
class Power(StringExpr):
    """n-fold tensor power."""

    base: StringExpr
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConstructionError(f"tensor power needs n >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class Tensor(StringExpr):
    """Tensor product of several strings (all pairwise products of lengths)."""

    parts: tuple[StringExpr, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ConstructionError("tensor product needs at least one factor")
        object.__setattr__(self, "parts", parts)


@dataclass(frozen=True)
class Scale(StringExpr):
    """All lengths multiplied by ``gamma > 0``."""

    gamma: float
    inner: StringExpr

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ConstructionError(f"scale factor must be positive, got {self.gamma!r}")
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass(frozen=True)
class Union(StringExpr):
    """Disjoint union (multiset union) of finitely many strings."""

    parts: tuple[StringExpr, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ConstructionError("union needs at least one part")
        object.__setattr__(self, "parts", parts)


class PartFamily:
    """A (possibly infinite) indexed family of weighted parts ``(c_k, L_k)``, k >= 1.

    The union represented is the disjoint union of ``c_k * L_k``.  Infinite
    families must certify their tails; subclasses override the methods below.
    """

    count: int | None = None

    def part(self, k: int) -> tuple[float, StringExpr]:
        raise NotImplementedError

    def length_tail(self, K: int) -> float:
        """Sum over k > K of c_k * |L_k|_1."""
        raise NotImplementedError

    def head_bound(self, k: int) -> float:
        """Upper bound for the largest length among parts j >= k."""
        raise NotImplementedError

    def zeta_tail(self, K: int, s, tol=None):
        """Array bound on |sum over k > K of c_k**s zeta_{L_k}(s)|; inf if unknown."""
        raise NotImplementedError

    def outside(self, s):
        """Boolean array: points where the union's zeta cannot be summed at all."""
        import numpy as np

        return np.zeros(np.shape(s), dtype=bool)

    def abscissa(self) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class FiniteFamily(PartFamily):
    def __init__(self, weights: Sequence[float], parts: Sequence[StringExpr]):
        if len(weights) != len(parts) or not parts:
            raise ConstructionError("weights and parts must be nonempty and of equal length")
        if any(not (w > 0 and math.isfinite(w)) for w in weights):
            raise ConstructionError("weights must be positive")
        self.weights = tuple(float(w) for w in weights)
        self.parts = tuple(parts)
        self.count = len(self.parts)

    def __eq__(self, other):
        return isinstance(other, FiniteFamily) and (self.weights, self.parts) == (other.weights, other.parts)

    def __hash__(self):
        return hash((self.weights, self.parts))

    def __repr__(self):
        return f"FiniteFamily({list(self.weights)}, {list(self.parts)})"

    def part(self, k):
        return self.weights[k - 1], self.parts[k - 1]

    def length_tail(self, K):
        return math.fsum(w * p.total_length for w, p in zip(self.weights[K:], self.parts[K:]))

    def head_bound(self, k):
        rest = [w * p.max_length for w, p in zip(self.weights[k - 1 :], self.parts[k - 1 :])]
        return max(rest) if rest else 0.0

    def zeta_tail(self, K, s, tol=None):
        import numpy as np

        return np.where(K >= self.count, 0.0, np.inf) * np.ones(np.shape(s))

    def abscissa(self):
        from .dimension import exact_abscissa

        return max(exact_abscissa(p).value for p in self.parts)

    def to_json(self):
        return {"kind": "finite", "weights": list(self.weights), "parts": [to_json(p) for p in self.parts]}


@dataclass(frozen=True)
class WeightedUnion(StringExpr):
    """Disjoint union of scaled parts ``c_k * L_k``; the family may be infinite."""

    family: PartFamily

    def __post_init__(self):
        total = self.total_length
        if not math.isfinite(total):
            raise ConstructionError("weighted union has infinite total length")

    @classmethod
    def of(cls, weights, parts) -> "WeightedUnion":
        return cls(FiniteFamily(weights, parts))


@dataclass(frozen=True)
class SeriesLift(StringExpr):
    """Power series of a string: union over n of ``c_n * inner**n`` (inner**0 is the unit string)."""

    coeffs: CoefficientFamily
    inner: StringExpr

    def __post_init__(self):
        if not self.inner.total_length < self.coeffs.radius:
            raise ConstructionError(
                f"|inner|_1 = {self.inner.total_length} is not below the radius "
                f"{self.coeffs.radius} of {self.coeffs.name}"
            )


UNIT = Explicit((LengthTerm(1.0),))


def cantor_string() -> StringExpr:
    """The Cantor string 1/3, 1/9, 1/9, 1/27 (x4), ..."""
    return Scale(1.0 / 3.0, GenCantor(2, 1.0 / 3.0))


def scale(gamma: float, e: StringExpr) -> StringExpr:
    return Scale(gamma, e)


def lift(family: CoefficientFamily, e: StringExpr) -> SeriesLift:
    return SeriesLift(family, e)


# ---------------------------------------------------------------------------
# total and maximal length


def total_length(e: StringExpr) -> float:
    """|e|_1, the sum of all lengths (the zeta function at s = 1)."""
    return e.total_length


def max_length(e: StringExpr) -> float:
    """The largest length of e."""
    return e.max_length


def _total_length(e: StringExpr) -> float:
    if isinstance(e, Explicit):
        return math.fsum(t.length * t.multiplicity for t in e.terms)
    if isinstance(e, SelfSimilar):
        return 1.0 / (1.0 - math.fsum(e.ratios))
    if isinstance(e, GenCantor):
        return 1.0 / (1.0 - e.m * e.a)
    if isinstance(e, InfiniteOrder):
        return math.expm1(1.0 / (1.0 - e.m * e.a))
    if isinstance(e, Power):
        return e.base.total_length**e.n
    if isinstance(e, Tensor):
        return math.prod(p.total_length for p in e.parts)
    if isinstance(e, Scale):
        return e.gamma * e.inner.total_length
    if isinstance(e, Union):
        return math.fsum(p.total_length for p in e.parts)
    if isinstance(e, WeightedUnion):
        fam = e.family
        if fam.count is not None:
            return math.fsum(w * p.total_length for w, p in (fam.part(k) for k in range(1, fam.count + 1)))
        acc = []
        for k in _count(1):
            w, p = fam.part(k)
            acc.append(w * p.total_length)
            tail = fam.length_tail(k)
            if tail <= 1e-17 * math.fsum(acc) or k >= 100000:
                return math.fsum(acc) + tail
    if isinstance(e, SeriesLift):
        return e.coeffs.value(e.inner.total_length)
    raise TypeError(f"not a string expression: {e!r}")


def _lift_terms_bound(fam: CoefficientFamily, x: float, start: int) -> float:
    """sup over nonzero n >= start of c_n x**n, or inf if no certificate yet."""
    best = 0.0
    n = fam.next_index(start)
    for _ in range(10000):
        c = fam.coefficient(n)
        if c > 0:
            best = max(best, c * x**n)
        if fam.ratio(n, 1.0, x) <= 1.0:
            return best
        n += fam.step
    return math.inf


def _max_length(e: StringExpr) -> float:
    if isinstance(e, Explicit):
        return max(t.length for t in e.terms)
    if isinstance(e, (SelfSimilar, GenCantor, InfiniteOrder)):
        return 1.0
    if isinstance(e, Power):
        return e.base.max_length**e.n
    if isinstance(e, Tensor):
        return math.prod(p.max_length for p in e.parts)
    if isinstance(e, Scale):
        return e.gamma * e.inner.max_length
    if isinstance(e, Union):
        return max(p.max_length for p in e.parts)
    if isinstance(e, WeightedUnion):
        return e.family.head_bound(1)
    if isinstance(e, SeriesLift):
        return _lift_terms_bound(e.coeffs, e.inner.max_length, 0)
    raise TypeError(f"not a string expression: {e!r}")


# ---------------------------------------------------------------------------
# lazy enumeration
#
# Every stream yields (length, multiplicity) pairs in nonincreasing length
# order; equal lengths may appear in several consecutive pairs.


class _LazySeq:
    """Random access into a stream, materialized on demand."""

    def __init__(self, it: Iterator):
        self._it = it
        self._items: list = []
        self._done = False

    def has(self, i: int) -> bool:
        while len(self._items) <= i and not self._done:
            try:
                self._items.append(next(self._it))
            except StopIteration:
                self._done = True
        return i < len(self._items)

    def __getitem__(self, i):
        self.has(i)
        return self._items[i]


def _explicit_stream(e: Explicit):
    for t in sorted(e.terms, key=lambda t: -t.length):
        yield t.length, t.multiplicity


def _gencantor_power_stream(m: int, a: float, lia: float, n: int, gamma: float = 1.0):
    # lengths gamma * a**J with multiplicity m**J * C(J + n - 1, n - 1)
    J = 0
    while True:
        length = gamma * (a**J if a > 0 else math.exp(-J * lia))
        if length == 0.0:
            return
        yield length, m**J * math.comb(J + n - 1, n - 1)
        J += 1


def _selfsimilar_stream(ratios: Sequence[float]):
    distinct = sorted(set(ratios), reverse=True)
    counts = [ratios.count(r) for r in distinct]
    d = len(distinct)
    if d == 1:
        yield from _gencantor_power_stream(counts[0], distinct[0], -math.log(distinct[0]), 1)
        return

    def length_of(alpha):
        return math.prod(r**k for r, k in zip(distinct, alpha))

    start = (0,) * d
    heap = [(-1.0, start)]
    seen = {start}
    while heap:
        neg, alpha = heapq.heappop(heap)
        if neg == 0.0:
            return
        total = sum(alpha)
        mult = math.factorial(total)
        for k, c in zip(alpha, counts):
            mult = mult // math.factorial(k) * c**k
        yield -neg, mult
        for i in range(d):
            nxt = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1 :]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (-length_of(nxt), nxt))


def _tensor_stream(streams: Sequence[Iterator]):
    seqs = [_LazySeq(it) for it in streams]
    if not all(q.has(0) for q in seqs):
        return
    k = len(seqs)

    def length_of(idx):
        return math.prod(seqs[i][j][0] for i, j in enumerate(idx))

    start = (0,) * k
    heap = [(-length_of(start), start)]
    seen = {start}
    while heap:
        neg, idx = heapq.heappop(heap)
        if neg == 0.0:
            return
        yield -neg, math.prod(seqs[i][j][1] for i, j in enumerate(idx))
        for i in range(k):
            if seqs[i].has(idx[i] + 1):
                nxt = idx[:i] + (idx[i] + 1,) + idx[i + 1 :]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, (-length_of(nxt), nxt))


def _merge_family(make_stream: Callable[[int], Iterator], bound: Callable[[int], float], first: int, count: int | None):
    """Merge streams indexed ``first, first+1, ...``; ``bound(i)`` bounds every head with index >= i."""
    heap: list = []
    tie = _count()
    nxt = first

    def activate(i):
        it = make_stream(i)
        for length, mult in it:
            heapq.heappush(heap, (-length, next(tie), mult, it))
            return

    while True:
        while (count is None or nxt < first + count) and (not heap or bound(nxt) >= -heap[0][0]):
            activate(nxt)
            nxt += 1
        if not heap:
            return
        neg, _, mult, it = heapq.heappop(heap)
        yield -neg, mult
        for length, m in it:
            heapq.heappush(heap, (-length, next(tie), m, it))
            break


def _scaled(gamma: float, it: Iterator):
    for length, mult in it:
        length *= gamma
        if length == 0.0:
            return
        yield length, mult


def _stream(e: StringExpr) -> Iterator[tuple[float, int]]:
    if isinstance(e, Explicit):
        return _explicit_stream(e)
    if isinstance(e, SelfSimilar):
        return _selfsimilar_stream(e.ratios)
    if isinstance(e, GenCantor):
        return _gencantor_power_stream(e.m, e.a, e.log_inv_a, 1)
    if isinstance(e, InfiniteOrder):
        m, a, lia = e.m, e.a, e.log_inv_a
        return _merge_family(
            lambda n: _gencantor_power_stream(m, a, lia, n, _inv_factorial(n)),
            _inv_factorial,
            1,
            None,
        )
    if isinstance(e, Power):
        b = e.base
        if isinstance(b, GenCantor):
            return _gencantor_power_stream(b.m, b.a, b.log_inv_a, e.n)
        if e.n == 1:
            return _stream(b)
        return _tensor_stream([_stream(b) for _ in range(e.n)])
    if isinstance(e, Tensor):
        if len(e.parts) == 1:
            return _stream(e.parts[0])
        return _tensor_stream([_stream(p) for p in e.parts])
    if isinstance(e, Scale):
        return _scaled(e.gamma, _stream(e.inner))
    if isinstance(e, Union):
        return heapq.merge(*(_stream(p) for p in e.parts), key=lambda t: -t[0])
    if isinstance(e, WeightedUnion):
        fam = e.family

        def make(k):
            w, p = fam.part(k)
            return _scaled(w, _stream(p))

        return _merge_family(make, fam.head_bound, 1, fam.count)
    if isinstance(e, SeriesLift):
        fam, inner = e.coeffs, e.inner
        x = inner.max_length

        def make(n):
            c = fam.coefficient(n)
            if c <= 0:
                return iter(())
            base = _explicit_stream(UNIT) if n == 0 else _stream(Power(inner, n))
            return _scaled(c, base)

        return _merge_family(make, lambda n: _lift_terms_bound(fam, x, n), 0, None)
    raise TypeError(f"not a string expression: {e!r}")


def enumerate_lengths(e: StringExpr, cutoff) -> Iterator[LengthTerm]:
    """Stream the length multiset of ``e`` in nonincreasing order.

    Equal lengths (compared exactly as floats) are coalesced into a single
    :class:`LengthTerm`.  The cutoff is :class:`MaxTerms`, :class:`MinLength`
    or :class:`MaxDistinct`; with ``MaxTerms`` the final term may carry only
    part of its multiplicity.
    """
    if not isinstance(cutoff, (MaxTerms, MinLength, MaxDistinct)):
        raise ConstructionError(f"unknown cutoff {cutoff!r}")
    emitted = 0
    distinct = 0
    cur_len = None
    cur_mult = 0

    def flush():
        nonlocal emitted, distinct
        mult = cur_mult
        if isinstance(cutoff, MaxTerms):
            mult = min(mult, cutoff.n - emitted)
        emitted += mult
        distinct += 1
        return LengthTerm(cur_len, mult)

    def full():
        if isinstance(cutoff, MaxTerms):
            return emitted >= cutoff.n
        if isinstance(cutoff, MaxDistinct):
            return distinct >= cutoff.n
        return False

    for length, mult in _stream(e):
        if isinstance(cutoff, MinLength) and length < cutoff.length:
            break
        if length == cur_len:
            cur_mult += mult
            continue
        if cur_len is not None:
            yield flush()
            if full():
                return
        cur_len, cur_mult = length, mult
        if isinstance(cutoff, MaxTerms) and emitted + cur_mult >= cutoff.n:
            # later equal lengths cannot change the emitted prefix
            yield flush()
            return
    if cur_len is not None and not full():
        yield flush()


# ---------------------------------------------------------------------------
# JSON expression form


def to_json(e: StringExpr) -> dict:
    """Tagged-variant dictionary for ``e`` (inverse of :func:`from_json`)."""
    if isinstance(e, Explicit):
        return {"type": "explicit", "terms": [[t.length, t.multiplicity] for t in e.terms]}
    if isinstance(e, SelfSimilar):
        return {"type": "selfsimilar", "ratios": list(e.ratios)}
    if isinstance(e, (GenCantor, InfiniteOrder)):
        tag = "gencantor" if isinstance(e, GenCantor) else "inforder"
        return {"type": tag, "m": e.m, "a": e.a, "log_inv_a": e.log_inv_a}
    if isinstance(e, Power):
        return {"type": "power", "n": e.n, "base": to_json(e.base)}
    if isinstance(e, Tensor):
        return {"type": "tensor", "parts": [to_json(p) for p in e.parts]}
    if isinstance(e, Scale):
        return {"type": "scale", "gamma": e.gamma, "inner": to_json(e.inner)}
    if isinstance(e, Union):
        return {"type": "union", "parts": [to_json(p) for p in e.parts]}
    if isinstance(e, WeightedUnion):
        return {"type": "weighted_union", "family": e.family.to_json()}
    if isinstance(e, SeriesLift):
        if _FAMILIES.get(e.coeffs.name) is not e.coeffs:
            raise ConstructionError("custom coefficient families cannot be serialized")
        return {"type": "lift", "family": e.coeffs.name, "inner": to_json(e.inner)}
    raise TypeError(f"not a string expression: {e!r}")


def from_json(d: dict) -> StringExpr:
    try:
        tag = d["type"]
        if tag == "explicit":
            return Explicit(tuple(LengthTerm(float(l), int(m)) for l, m in d["terms"]))
        if tag == "selfsimilar":
            return SelfSimilar(tuple(d["ratios"]))
        if tag in ("gencantor", "inforder"):
            cls = GenCantor if tag == "gencantor" else InfiniteOrder
            return cls(int(d["m"]), float(d["a"]), d.get("log_inv_a"))
        if tag == "power":
            return Power(from_json(d["base"]), int(d["n"]))
        if tag == "tensor":
            return Tensor(tuple(from_json(p) for p in d["parts"]))
        if tag == "scale":
            return Scale(float(d["gamma"]), from_json(d["inner"]))
        if tag == "union":
            return Union(tuple(from_json(p) for p in d["parts"]))
        if tag == "weighted_union":
            return WeightedUnion(_family_from_json(d["family"]))
        if tag == "lift":
            return SeriesLift(_FAMILIES[d["family"]], from_json(d["inner"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise ConstructionError(f"malformed expression JSON: {exc}") from exc
    raise ConstructionError(f"unknown expression type {tag!r}")


def _family_from_json(d: dict) -> PartFamily:
    kind = d.get("kind")
    if kind == "finite":
        return FiniteFamily(d["weights"], [from_json(p) for p in d["parts"]])
    if kind == "cantor_schedule":
        from .prescriber import CantorSchedule

        return CantorSchedule.from_json(d)
    raise ConstructionError(f"unknown part family {kind!r}")
