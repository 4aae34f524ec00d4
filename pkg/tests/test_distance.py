import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from fractalzeta.cantor import SingularityLattice
from fractalzeta.distance import (
    EmbeddedFlat,
    GenCantorSet,
    Grill,
    Realization,
    UnionSet,
    abscissa_probe,
    construct_set,
    dzeta_grill,
    dzeta_line,
    dzeta_line_bounded,
    dzeta_monte_carlo,
    neighborhood_volume,
    set_lattices,
    shift_lattices,
)
from fractalzeta.errors import ConstructionError, EstimateUnavailable, OutsideHalfPlaneError
from fractalzeta.prescriber import construct
from fractalzeta.strings import Explicit, GenCantor, cantor_string
from fractalzeta.zeta import known_lattices

CANTOR_D = math.log(2) / math.log(3)


def quad_line_zeta(points, s, delta):
    # integral of d(x, A)^(s-1) over (-delta, max + delta), split at points and midpoints
    pts = sorted(points)

    def d(x):
        return min(abs(x - p) for p in pts)

    breaks = sorted(set(pts + [(a + b) / 2 for a, b in zip(pts, pts[1:])]))
    edges = [pts[0] - delta] + breaks + [pts[-1] + delta]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        total += quad(lambda x: d(x) ** (s - 1), lo, hi, epsabs=1e-14, epsrel=1e-13)[0]
    return total


def test_explicit_line_against_quadrature():
    e = Explicit.of(1 / 2, 1 / 4)
    got = dzeta_line(e, 1.5, 1.0)
    formula = 2**-0.5 / 1.5 * (0.5**1.5 + 0.25**1.5) + 2 / 1.5
    # the realization is {0, 1/4, 3/4}
    oracle = quad_line_zeta([0.0, 0.25, 0.75], 1.5, 1.0)
    assert got == pytest.approx(formula, rel=1e-14)
    assert abs(got - oracle) <= 1e-10


@pytest.mark.parametrize("e,delta", [(cantor_string(), 1 / 3), (Explicit.of(0.5, 0.25), 1.0), (GenCantor(3, 0.2), 0.7)])
def test_line_at_one_is_neighborhood_length(e, delta):
    v, b = dzeta_line_bounded(e, 1.0, delta)
    assert abs(v - (e.total_length + 2 * delta)) <= b + 1e-13


def test_line_errors():
    e = cantor_string()
    with pytest.raises(ConstructionError):
        dzeta_line(e, 1.0, 0.1)  # delta below half the largest length
    with pytest.raises(ConstructionError):
        dzeta_line(e, 0.0, 1.0)
    with pytest.raises(OutsideHalfPlaneError):
        dzeta_line(e, 0.5, 1.0)


def test_monte_carlo_matches_line_closed_form():
    R = Realization(cantor_string())
    mc = dzeta_monte_carlo(R, 1.2, 1 / 3, 1_000_000, seed=5)
    exact = dzeta_line(cantor_string(), 1.2, 1 / 3)
    assert abs(mc.value - exact) <= 3 * mc.stderr
    assert mc.unsampled <= 1e-2


def test_monte_carlo_is_deterministic():
    A = Grill(Realization(cantor_string()), 1)
    r1 = dzeta_monte_carlo(A, 1.8 + 0.3j, 1 / 3, 20_000, seed=9)
    r2 = dzeta_monte_carlo(A, 1.8 + 0.3j, 1 / 3, 20_000, seed=9)
    assert r1 == r2
    assert dzeta_monte_carlo(A, 1.8 + 0.3j, 1 / 3, 20_000, seed=10) != r1


@pytest.mark.parametrize(
    "A",
    [
        Realization(cantor_string()),
        Grill(Realization(cantor_string()), 1),
        EmbeddedFlat(Realization(cantor_string()), 1),
        GenCantorSet(2, 1 / 3),
    ],
    ids=["line", "grill", "flat", "cantor-set"],
)
def test_value_at_ambient_dimension_is_volume(A):
    delta = 1 / 3
    vol, err = neighborhood_volume(A, delta)
    mc = dzeta_monte_carlo(A, float(A.ambient), delta, 200_000, seed=1)
    assert abs(mc.value.real - vol) <= 3 * math.hypot(mc.stderr, err) + 1e-10


def test_grill_volume_shift_path():
    R = Realization(cantor_string())
    vol, _ = neighborhood_volume(Grill(R, 1), 1 / 3)
    v, se = dzeta_grill(cantor_string(), 2, 2.0, 1 / 3, 200_000, seed=2)
    assert abs(v.real - vol) <= 3 * se + 1e-10


def random_s(rng, n, lo):
    return lo + rng.uniform(0, 0.8, n) + 1j * rng.uniform(-5, 5, n)


def test_shift_identity():
    rng = np.random.default_rng(4)
    base = cantor_string()
    A = Grill(Realization(base), 1)
    for k, s in enumerate(random_s(rng, 20, 1 + CANTOR_D + 0.1)):
        full = dzeta_monte_carlo(A, s, 1 / 3, 100_000, seed=100 + k)
        shifted, se = dzeta_grill(base, 2, s, 1 / 3, 100_000, seed=200 + k)
        assert abs(full.value - shifted) <= 3 * math.hypot(full.stderr, se)


def test_single_delta_strip_term_breaks_the_identity():
    # the slabs beside both end faces give 2 delta^t / t; one delta^t / t is short by a slab
    base = cantor_string()
    s, delta = 2.0, 1 / 3
    vol, _ = neighborhood_volume(Grill(Realization(base), 1), delta)
    v, se = dzeta_grill(base, 2, s, delta, 200_000, seed=3)
    t = s - 1
    halved = v - cmath.exp(t * math.log(delta)) / t
    assert abs(v.real - vol) <= 3 * se + 1e-10
    assert abs(halved.real - vol) > 100 * se


def test_grill_lattices_shift_by_n_minus_one():
    base = cantor_string()
    grill, extra = set_lattices(Grill(Realization(base), 2))
    want = known_lattices(base)
    assert extra == []
    assert [(l.real_part, l.period, l.kind) for l in grill] == [(l.real_part + 2, l.period, l.kind) for l in want]


def test_zero_singularity_adds_isolated_point():
    lat = [SingularityLattice(0.0, 1.0), SingularityLattice(0.4, 2.0, "essential")]
    moved, extra = shift_lattices(lat, 1)
    assert [l.real_part for l in moved] == [1.0, 1.4]
    assert extra == [1 + 0j]
    assert shift_lattices(lat[1:], 1)[1] == []


def test_construct_set_cases():
    one = construct_set(0.2, 0.5, 0.5, 1)
    assert isinstance(one, Realization)
    assert one.of.total_length == pytest.approx(construct(0.2, 0.5, 0.5).expr.total_length, rel=1e-15)

    two = construct_set(1.2, 1.5, 1.8, 2)
    assert isinstance(two, Grill) and two.extra_dims == 1
    assert two.dimension == pytest.approx(1.8, abs=1e-12)

    three = construct_set(0.3, 1.4, 2.6, 3)
    assert isinstance(three, UnionSet) and len(three.parts) == 3
    a2, b, c = three.parts
    # B lives in R^2 and is embedded flat into R^3
    assert isinstance(b, EmbeddedFlat) and b.zero_dims == 1
    assert isinstance(b.base, Grill) and b.base.extra_dims == 1
    assert b.base.base.dimension == pytest.approx(0.4, abs=1e-12)
    assert isinstance(a2, EmbeddedFlat) and a2.ambient == 3
    assert isinstance(c, Grill) and c.extra_dims == 2
    assert c.base.dimension == pytest.approx(0.6, abs=1e-12)
    assert three.dimension == pytest.approx(2.6, abs=1e-12)
    assert {p.ambient for p in three.parts} == {3}


def test_construct_set_errors():
    with pytest.raises(ConstructionError):
        construct_set(0.5, 0.4, 0.6, 1)
    with pytest.raises(ConstructionError):
        construct_set(0.2, 0.5, 1.0, 1)
    with pytest.raises(ConstructionError, match="integer"):
        construct_set(0.3, 1.0, 2.6, 3)
    shifted = construct_set(0.3, 1.0, 2.6, 3, integer_offset=0.05)
    assert shifted.parts[1].base.dimension == pytest.approx(0.95, abs=1e-12)
    # an infinite-order atom this close to dimension 1 is longer than any double
    with pytest.raises(ConstructionError):
        construct_set(0.3, 1.0, 2.6, 3, integer_offset=1e-3)


def test_monte_carlo_refuses_when_gap_weight_is_missed():
    P = Realization(construct(0.2, 0.5, 0.5).expr)
    with pytest.raises(EstimateUnavailable):
        dzeta_monte_carlo(P, 0.55, P.max_gap(), 200_000)


def test_probe_on_cantor_realization():
    R = Realization(cantor_string())
    D = abscissa_probe(R, [0.68, 0.72, 0.78, 0.86, 0.95], 1 / 3, 200_000)
    assert abs(D - CANTOR_D) <= 0.05


def test_probe_on_prescribed_realization():
    P = Realization(construct(0.2, 0.5, 0.5).expr)
    D = abscissa_probe(P, [0.6, 0.66, 0.75, 0.85, 1.0], P.max_gap(), 200_000)
    assert abs(D - 0.5) <= 0.05
