import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractalzeta.cantor import (
    CantorParams,
    SingularityLattice,
    cantor_string_zeta,
    closed_form_zeta,
    infinite_order_length,
    laurent_numeric,
    laurent_principal,
    one_minus_mas,
    self_similar_zeta,
    singularity_lattice,
)
from fractalzeta.errors import ConstructionError, SingularityError
from fractalzeta.strings import GenCantor, MaxDistinct, Power, enumerate_lengths
from fractalzeta.zeta import eval_zeta


def dirichlet_oracle(m, a, n, s, levels=400):
    # (1 - x)^-n = sum_k C(k+n-1, n-1) x^k with x = m a^s
    x = m * cmath.exp(s * math.log(a))
    return sum(math.comb(k + n - 1, n - 1) * x**k for k in range(levels))


params = st.builds(
    lambda m, f: CantorParams(m, f / m),
    st.integers(2, 5),
    st.floats(0.1, 0.9),
)


@pytest.mark.parametrize("m,a,n,s", [(2, 1 / 3, 1, 1.0), (2, 1 / 3, 2, 1.5 + 2j), (3, 0.1, 3, 0.8 - 5j), (4, 0.2, 1, 2 + 30j)])
def test_closed_form_matches_series(m, a, n, s):
    got = closed_form_zeta(CantorParams(m, a), n, s)
    want = dirichlet_oracle(m, a, n, s)
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_cantor_string_zeta():
    assert abs(cantor_string_zeta(1.0) - 1.0) <= 1e-15
    s = 1.3 + 4j
    want = sum(2**k * cmath.exp(-(k + 1) * s * math.log(3)) for k in range(300))
    assert abs(cantor_string_zeta(s) - want) <= 1e-13


def test_self_similar_zeta_against_moran_series():
    s = 2.0 + 1j
    x = 0.2**s + 0.3**s
    want = sum(x**k for k in range(200))
    assert abs(self_similar_zeta((0.2, 0.3), s) - want) <= 1e-13
    with pytest.raises(ConstructionError):
        self_similar_zeta((0.6, 0.5), 1.0)


def enumerated_sum(e, s, levels):
    return sum(t.multiplicity * cmath.exp(s * math.log(t.length)) for t in enumerate_lengths(e, MaxDistinct(levels)))


@settings(max_examples=200)
@given(params, st.floats(0.1, 1.0), st.floats(-20, 20))
def test_closed_form_vs_enumerated_sum(p, shift, im):
    s = complex(p.dimension + shift, im)
    x = p.m * p.a ** s.real
    levels = 600
    # the GenCantor lengths start at a^0 = 1, level j carries m^j copies of a^j
    tail = x**levels / (1 - x)
    got = closed_form_zeta(p, 1, s)
    want = enumerated_sum(GenCantor(p.m, p.a, p.log_inv_a), s, levels)
    assert abs(got - want) <= 1e-8 * abs(got) + tail


@pytest.mark.parametrize("n,s", [(2, 1.2 + 3j), (3, 0.9 - 1j)])
def test_tensor_power_vs_enumerated_sum(n, s):
    p = CantorParams(2, 0.2)
    e = Power(GenCantor(2, 0.2), n)
    # levels of the n-fold product are sums of n indices
    want = enumerated_sum(e, s, 400)
    got = closed_form_zeta(p, n, s)
    assert abs(got - want) <= 1e-8 * abs(got)


@given(params, st.integers(1, 4), st.floats(0.2, 3.0), st.floats(-40, 40))
def test_tensor_power_identity(p, n, re, im):
    s = complex(re, im)
    try:
        one = closed_form_zeta(p, 1, s)
        got = closed_form_zeta(p, n, s)
    except SingularityError:
        return
    assert abs(got - one**n) <= 1e-9 * abs(got)
    if re > p.dimension + 0.05:
        # a second route through the generic evaluator
        r = eval_zeta(Power(GenCantor(p.m, p.a, p.log_inv_a), n), s, 1e-10 * max(1.0, abs(got)))
        assert abs(r.value - got) <= r.error_bound + 1e-9 * abs(got)


@settings(max_examples=50)
@given(params, st.integers(1, 3), st.floats(0.1, 2.0), st.floats(-20, 20), st.integers(-50, 50))
def test_periodic_in_imaginary_direction(p, n, re, im, k):
    s = complex(re, im)
    try:
        v0 = closed_form_zeta(p, n, s)
        v1 = closed_form_zeta(p, n, s + 1j * k * p.period)
    except SingularityError:
        return
    assert abs(v0 - v1) <= 1e-9 * max(1.0, abs(v0))


@pytest.mark.parametrize("direction", ["right", "left", "up", "down"])
@pytest.mark.parametrize("m,a,n,j", [(2, 1 / 3, 1, 0), (3, 0.2, 2, 1), (2, 0.25, 3, 7), (5, 0.1, 1, -4)])
def test_laurent_coefficient(direction, m, a, n, j):
    p = CantorParams(m, a)
    want = laurent_principal(p, n, j)
    assert want == pytest.approx(math.log(1 / a) ** -n, rel=1e-15)
    got = laurent_numeric(p, n, j, direction)
    assert abs(got - want) <= 1e-6 * want


def test_m_power_coefficient_is_not_the_residue():
    p = CantorParams(2, 1 / 3)
    residue = laurent_numeric(p, 1, 0)
    assert abs(residue - 2 / math.log(3)) > 0.3
    assert abs(residue - 1 / math.log(3)) <= 1e-8


def test_cantor_lattice():
    p = CantorParams(2, 1 / 3)
    lat = singularity_lattice(p, 1)
    assert lat.real_part == pytest.approx(math.log(2) / math.log(3), rel=1e-15)
    assert lat.period == pytest.approx(2 * math.pi / math.log(3), rel=1e-15)
    pts = lat.points_in_window(0, 1, -6, 6)
    assert [round(z.imag / lat.period) for z in pts] == [-1, 0, 1]
    assert lat.points_in_window(0.7, 1, -6, 6) == []
    ess = singularity_lattice(p, math.inf)
    assert ess.kind == "essential" and ess.order is None
    assert singularity_lattice(p, "infinite") == ess


def test_lattice_validation():
    with pytest.raises(ConstructionError):
        SingularityLattice(0.5, 0.0)
    with pytest.raises(ConstructionError):
        SingularityLattice(0.5, 1.0, "pole", 0)
    with pytest.raises(ConstructionError):
        singularity_lattice(CantorParams(2, 0.3), 1.5)


def test_params_validation_and_dimension():
    with pytest.raises(ConstructionError):
        CantorParams(1, 0.5)
    with pytest.raises(ConstructionError):
        CantorParams(2, 0.5)
    with pytest.raises(ConstructionError):
        CantorParams.from_dimension(2, 1.0)
    p = CantorParams.from_dimension(3, 0.4)
    assert p.dimension == pytest.approx(0.4, rel=1e-15)
    assert p.m * p.a**0.4 == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("m,a", [(2, 0.25), (3, 0.1), (2, 0.4)])
def test_infinite_order_length(m, a):
    got = infinite_order_length(CantorParams(m, a))
    w = 1.0 / (1.0 - m * a)
    assert got == pytest.approx(math.expm1(w), rel=1e-14)
    oracle = math.fsum(w**n / math.factorial(n) for n in range(1, 80))
    assert got == pytest.approx(oracle, rel=1e-13)


def test_infinite_order_length_example():
    assert infinite_order_length(CantorParams(2, 0.25)) == pytest.approx(math.e**2 - 1, rel=1e-15)


@given(params)
def test_infinite_order_length_exceeds_e_minus_one(p):
    assert infinite_order_length(p) > math.e - 1


def test_infinite_order_length_small_ratio_limit():
    vals = [infinite_order_length(CantorParams(2, a)) for a in (1e-3, 1e-6, 1e-9)]
    assert abs(vals[-1] - (math.e - 1)) <= 1e-8
    assert vals[0] > vals[1] > vals[2]


@pytest.mark.parametrize("j", [0, 1, -3, 1000])
def test_lattice_hit_raises(j):
    p = CantorParams(2, 1 / 3)
    s = p.lattice_point(j)
    with pytest.raises(SingularityError) as info:
        closed_form_zeta(p, 2, s)
    assert info.value.nearest == pytest.approx(s)


@pytest.mark.parametrize("j", [0, 10, 10_000])
def test_one_minus_mas_relative_accuracy_far_up(j):
    p = CantorParams(2, 1 / 3)
    h = 1e-9
    d = complex(one_minus_mas(p.m, p.log_inv_a, p.lattice_point(j) + h))
    assert d == pytest.approx(p.log_inv_a * h, rel=1e-6)
