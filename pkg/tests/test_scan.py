import numpy as np
import pytest

from fractalzeta.errors import ConstructionError
from fractalzeta.prescriber import construct, singularities_in_window
from fractalzeta.scan import CLIP_FRACTION, barrier_of, clip_window, lattice_points, proximal_mask, scan
from fractalzeta.strings import GenCantor, Union, cantor_string


@pytest.fixture(scope="module")
def case_i():
    return construct(0.2, 0.5, 0.5)


def test_markers_only_match_window_listing(case_i):
    window = (0.25, 0.9, 0.0, 3.0)
    g = scan(case_i.expr, window, (200, 200), evaluate=False)
    listed = singularities_in_window(case_i, *window)
    assert [z for z, _ in g.singularities] == [z for z, _ in listed]
    assert g.marker_counts()["singularity-proximal"] == len(listed)
    assert np.isnan(g.values).all()


def test_every_listed_point_marks_its_nearest_node(case_i):
    window = (0.25, 0.9, -3.0, 3.0)
    g = scan(case_i.expr, window, (120, 90), evaluate=False)
    marked = g.status != 0
    for z, _ in g.singularities:
        i = np.argmin(np.abs(g.re_axis - z.real))
        j = np.argmin(np.abs(g.im_axis - z.imag))
        assert marked[j, i]


def test_markers_grow_toward_the_barrier(case_i):
    counts = []
    for lo in (0.45, 0.3, 0.22):
        g = scan(case_i.expr, (lo, lo + 0.05, 0.0, 5.0), (100, 100), evaluate=False)
        counts.append(g.marker_counts()["singularity-proximal"])
    assert counts[0] < counts[1] < counts[2]


def test_regular_right_of_d1(case_i):
    g = scan(case_i.expr, (0.52, 1.2, -10.0, 10.0), (40, 40), tol=1e-8)
    assert g.marker_counts()["regular"] == 40 * 40
    assert np.all(g.bounds <= 1e-8 * np.maximum(1.0, np.abs(g.values)))


def test_conjugate_rows(case_i):
    g = scan(case_i.expr, (0.3, 1.0, -3.0, 3.0), (15, 21), tol=1e-10)
    ok = (g.status == 0) & (g.status[::-1] == 0)
    v, b = g.values, g.bounds
    flipped = v[::-1].conj()
    diff = np.abs(v - flipped)[ok]
    assert ok.sum() > 100
    assert np.all(diff <= (b + b[::-1])[ok] + 1e-13 * np.abs(v[ok]))


def test_values_match_pointwise_evaluation(case_i):
    from fractalzeta.zeta import eval_zeta

    g = scan(case_i.expr, (0.6, 1.0, 0.0, 2.0), (5, 4), tol=1e-10)
    for j, y in enumerate(g.im_axis):
        for i, x in enumerate(g.re_axis):
            r = eval_zeta(case_i.expr, complex(x, y), 1e-12)
            assert abs(g.values[j, i] - r.value) <= g.bounds[j, i] + r.error_bound


def test_window_clipped_at_barrier(case_i):
    g = scan(case_i.expr, (0.0, 0.6, 0.0, 1.0), (10, 10), evaluate=False)
    assert g.clipped and g.requested_re_min == 0.0
    assert g.window[0] == pytest.approx(0.2 + CLIP_FRACTION * 0.4)
    with pytest.raises(ConstructionError):
        clip_window((0.0, 0.2, 0.0, 1.0), 0.2)
    assert clip_window((0.3, 0.6, 0.0, 1.0), 0.2) == ((0.3, 0.6, 0.0, 1.0), False)


def test_barrier_only_for_infinite_families(case_i):
    assert barrier_of(case_i.expr) == 0.2
    assert barrier_of(Union((cantor_string(), GenCantor(3, 0.2)))) is None


@pytest.mark.parametrize("window,res", [((1.0, 0.5, 0.0, 1.0), (10, 10)), ((0.0, 1.0, 0.0, 1.0), (1, 10)), ((0.0, np.inf, 0.0, 1.0), (5, 5))])
def test_bad_windows(window, res):
    with pytest.raises(ConstructionError):
        scan(cantor_string(), window, res)


def test_proximal_mask_guard():
    re_axis = np.linspace(0, 1, 11)
    im_axis = np.linspace(0, 1, 11)
    pts = [(complex(0.52, 0.5), "pole(1)")]
    m = proximal_mask(re_axis, im_axis, pts, guard=0.0)
    assert m.sum() == 1 and m[5, 5]
    wide = proximal_mask(re_axis, im_axis, pts, guard=0.15)
    assert wide.sum() > 1 and wide[5, 4] and wide[5, 6]


def test_cantor_poles_listed():
    pts = lattice_points(cantor_string(), 0.0, 1.0, -10.0, 10.0)
    period = 2 * np.pi / np.log(3)
    assert [round(z.imag / period) for z, _ in pts] == [-1, 0, 1]
    assert {k for _, k in pts} == {"pole(1)"}


def test_csv_layout(case_i):
    g = scan(case_i.expr, (0.6, 1.0, 0.0, 1.0), (3, 2), tol=1e-8)
    lines = g.to_csv().splitlines()
    assert lines[0] == "re,im,zeta_re,zeta_im,abs,log_abs,marker"
    rows = [l.split(",") for l in lines[1:7]]
    assert all(len(r) == 7 for r in rows)
    # imaginary part outer, real part inner
    assert [float(r[1]) for r in rows] == [0.0, 0.0, 0.0, 1.0, 1.0, 1.0]
    assert float(rows[1][0]) == pytest.approx(0.8)
    assert lines[7] == "# singularities"
    assert lines[8] == "re,im,kind"


def test_json_layout(case_i):
    d = scan(case_i.expr, (0.45, 0.55, -1.0, 1.0), (5, 5), evaluate=False).to_json()
    assert d["resolution"] == [5, 5]
    assert len(d["cells"]) == 25
    assert d["singularities"] == [{"re": 0.5, "im": 0.0, "kind": "essential"}]
    assert d["cells"][12]["marker"] == "singularity-proximal"
