import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from fractalzeta.dimension import DimensionEstimate, estimate_abscissa, exact_abscissa, moran_root
from fractalzeta.errors import ConstructionError
from fractalzeta.prescriber import construct
from fractalzeta.strings import (
    EXP,
    Explicit,
    GenCantor,
    InfiniteOrder,
    Power,
    Scale,
    SelfSimilar,
    Tensor,
    Union,
    lift,
)

cantors = st.builds(lambda m, f: GenCantor(m, f / m), st.integers(2, 5), st.floats(0.2, 0.9))
similars = st.builds(lambda r: SelfSimilar(tuple(r)), st.lists(st.floats(0.05, 0.45), min_size=2, max_size=3).filter(lambda r: sum(r) < 0.95))
atoms = st.one_of(cantors, similars, st.builds(lambda xs: Explicit.of(*xs), st.lists(st.floats(0.01, 0.5), min_size=1, max_size=3)))


def moran_oracle(ratios):
    return brentq(lambda s: sum(r**s for r in ratios) - 1.0, 1e-9, 1.0, xtol=1e-14)


def test_exact_examples():
    assert exact_abscissa(GenCantor(2, 1 / 3)).value == pytest.approx(math.log(2) / math.log(3), rel=1e-15)
    assert exact_abscissa(GenCantor(2, 1 / 3)).method == "exact-symbolic"
    assert exact_abscissa(SelfSimilar((1 / 3, 1 / 3))).value == pytest.approx(math.log(2) / math.log(3), rel=1e-15)
    assert exact_abscissa(Explicit.of(0.5)).value == 0.0
    assert exact_abscissa(construct(0.2, 0.5, 0.5).core).value == 0.5
    assert exact_abscissa(construct(0.0, 0.3, 0.7).expr).value == pytest.approx(0.7, rel=1e-15)


@given(similars)
def test_moran_root_against_brentq(e):
    assert moran_root(e.ratios) == pytest.approx(moran_oracle(e.ratios), abs=2e-12)


def test_structural_rules():
    c = GenCantor(3, 0.2)
    d = math.log(3) / math.log(5)
    assert exact_abscissa(Power(c, 3)).value == pytest.approx(d, rel=1e-15)
    assert exact_abscissa(lift(EXP, c)).value == pytest.approx(d, rel=1e-15)
    assert exact_abscissa(Tensor((c, GenCantor(2, 1 / 3)))).value == pytest.approx(d, rel=1e-15)


@pytest.mark.parametrize("gamma", [0.1, 1.0, 3.0])
@given(e=atoms)
def test_scaling_invariance(gamma, e):
    assert exact_abscissa(Scale(gamma, e)).value == exact_abscissa(e).value


@given(atoms, atoms)
def test_union_supremum(a, b):
    assert exact_abscissa(Union((a, b))).value == max(exact_abscissa(a).value, exact_abscissa(b).value)


def test_estimate_examples():
    est = estimate_abscissa(GenCantor(2, 1 / 3), 10_000)
    d = math.log(2) / math.log(3)
    assert est.method == "prefix-regression"
    assert abs(est.value - 0.631) <= 0.02
    assert est.brackets(d)
    assert estimate_abscissa(GenCantor(3, 1 / 5), 10_000).brackets(math.log(3) / math.log(5))
    fin = estimate_abscissa(Explicit.of(0.5, 0.25), 10_000)
    assert (fin.value, fin.confidence_width) == (0.0, 0.0)


@settings(max_examples=20)
@given(st.one_of(cantors, similars))
def test_estimate_brackets_exact(e):
    est = estimate_abscissa(e, 10_000)
    assert est.brackets(exact_abscissa(e).value)


@pytest.mark.parametrize("e", [InfiniteOrder(2, 0.25), Power(GenCantor(2, 0.2), 2)], ids=["infinite-order", "power"])
def test_estimate_other_atoms(e):
    # slowly varying factors in the counting function (log powers, the n! lengths)
    # bias a pure power-law fit at 10^4 terms
    est = estimate_abscissa(e, 10_000)
    assert est.brackets(exact_abscissa(e).value)


def test_estimate_rejects_small_prefix():
    with pytest.raises(ConstructionError):
        estimate_abscissa(GenCantor(2, 1 / 3), 50)


def test_estimate_validation():
    with pytest.raises(ConstructionError):
        DimensionEstimate(0.5, "guess")
    with pytest.raises(ConstructionError):
        DimensionEstimate(0.5, "exact-symbolic", -1.0)
