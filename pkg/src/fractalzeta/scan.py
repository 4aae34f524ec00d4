"""Rectangular grid scans of a zeta function with singularity markers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError
from .strings import (
    Power,
    Scale,
    SeriesLift,
    StringExpr,
    Tensor,
    Union,
    WeightedUnion,
)
from .textio import csv_line
from .zeta import DEFAULT_GUARD, OUTSIDE, OVERFLOW, SINGULAR, UNCERTIFIED, eval_zeta_array, known_lattices

__all__ = ["ScanGrid", "scan", "barrier_of", "lattice_points", "proximal_mask", "MARKERS", "CLIP_FRACTION"]

CSV_HEADER = "re,im,zeta_re,zeta_im,abs,log_abs,marker"
MARKERS = {0: "regular", SINGULAR: "singularity-proximal", OUTSIDE: "outside-halfplane",
           UNCERTIFIED: "uncertified", OVERFLOW: "overflow"}
# a clipped window starts this fraction of its width right of the barrier
CLIP_FRACTION = 1e-2
_ROWS_PER_BLOCK = 8


def barrier_of(e: StringExpr) -> float | None:
    """Rightmost natural boundary among the infinite families inside ``e``."""
    found = []

    def walk(x):
        if isinstance(x, WeightedUnion):
            b = getattr(x.family, "d_inf", None)
            if b is not None and x.family.count is None:
                found.append(b)
        elif isinstance(x, (Union, Tensor)):
            for p in x.parts:
                walk(p)
        elif isinstance(x, Power):
            walk(x.base)
        elif isinstance(x, (Scale, SeriesLift)):
            walk(x.inner)

    walk(e)
    return max(found) if found else None


def lattice_points(e: StringExpr, re_min, re_max, im_min, im_max) -> list[tuple[complex, str]]:
    """Known singular points of ``e`` inside the closed window, sorted."""
    seen = {}
    for lat in known_lattices(e, re_min=re_min):
        kind = "essential" if lat.kind == "essential" else f"pole({lat.order})"
        for z in lat.points_in_window(re_min, re_max, im_min, im_max):
            # a line shared by several atoms keeps the strongest label
            if z not in seen or kind == "essential":
                seen[z] = kind
    return sorted(seen.items(), key=lambda t: (t[0].real, t[0].imag))


def proximal_mask(re_axis, im_axis, points, guard: float = DEFAULT_GUARD) -> np.ndarray:
    """Boolean (n_im, n_re) mask of the grid nodes standing for singular points.

    A node is marked when it is the nearest node to a point (the point lies in
    its cell) or lies within ``guard`` of one.
    """
    re_axis, im_axis = np.asarray(re_axis), np.asarray(im_axis)
    mask = np.zeros((len(im_axis), len(re_axis)), bool)
    if not points:
        return mask
    dre = re_axis[1] - re_axis[0]
    dim = im_axis[1] - im_axis[0]
    for z, _ in points:
        i = int(np.clip(round((z.real - re_axis[0]) / dre), 0, len(re_axis) - 1))
        j = int(np.clip(round((z.imag - im_axis[0]) / dim), 0, len(im_axis) - 1))
        mask[j, i] = True
    if guard > 0:
        zs = np.array([z for z, _ in points])
        S = re_axis[None, :] + 1j * im_axis[:, None]
        for z in zs:
            mask |= np.abs(S - z) <= guard
    return mask


@dataclass
class ScanGrid:
    window: tuple[float, float, float, float]
    resolution: tuple[int, int]
    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray  # (n_im, n_re) complex, nan where not evaluated
    bounds: np.ndarray
    status: np.ndarray
    singularities: list = field(default_factory=list)
    clipped: bool = False
    requested_re_min: float | None = None

    @property
    def log_abs(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs(self.values))

    def markers(self) -> np.ndarray:
        return np.vectorize(MARKERS.__getitem__, otypes=[object])(self.status)

    def marker_counts(self) -> dict:
        return {name: int((self.status == k).sum()) for k, name in MARKERS.items()}

    def cells(self):
        """Row-major records: imaginary part outer, real part inner."""
        la, mk = self.log_abs, self.markers()
        for j, y in enumerate(self.im_axis):
            for i, x in enumerate(self.re_axis):
                v = self.values[j, i]
                yield (float(x), float(y), v.real, v.imag, abs(v), la[j, i], mk[j, i])

    def to_csv(self) -> str:
        out = [CSV_HEADER + "\n"]
        out.extend(csv_line(c) for c in self.cells())
        out.append("# singularities\n")
        out.append("re,im,kind\n")
        out.extend(csv_line((z.real, z.imag, kind)) for z, kind in self.singularities)
        return "".join(out)

    def to_json(self) -> dict:
        keys = ("re", "im", "zeta_re", "zeta_im", "abs", "log_abs", "marker")
        return {
            "window": list(self.window),
            "resolution": list(self.resolution),
            "clipped": self.clipped,
            "marker_counts": self.marker_counts(),
            "cells": [dict(zip(keys, c)) for c in self.cells()],
            "error_bounds": [float(b) for b in self.bounds.ravel()],
            "singularities": [{"re": z.real, "im": z.imag, "kind": k} for z, k in self.singularities],
        }

    def plot_data(self) -> dict:
        return {"re_axis": self.re_axis, "im_axis": self.im_axis, "log_abs": self.log_abs,
                "singularities": self.singularities}


def _check_window(window, res):
    re_min, re_max, im_min, im_max = (float(w) for w in window)
    n_re, n_im = (int(r) for r in res)
    if not all(math.isfinite(w) for w in (re_min, re_max, im_min, im_max)):
        raise ConstructionError("window bounds must be finite")
    if not (re_min < re_max and im_min < im_max):
        raise ConstructionError("window needs reMin < reMax and imMin < imMax")
    if n_re < 2 or n_im < 2:
        raise ConstructionError("resolution needs at least 2 x 2 nodes")
    return (re_min, re_max, im_min, im_max), (n_re, n_im)


def clip_window(window, barrier: float | None):
    """Move the left edge right of ``barrier``; returns (window, clipped)."""
    re_min, re_max, im_min, im_max = window
    if barrier is None or re_min > barrier:
        return window, False
    if re_max <= barrier:
        raise ConstructionError(f"window lies entirely left of the barrier Re s = {barrier}")
    return (barrier + CLIP_FRACTION * (re_max - barrier), re_max, im_min, im_max), True


def scan(e: StringExpr, window, res, tol: float = 1e-6, guard: float = DEFAULT_GUARD,
         evaluate: bool = True, relative: bool = True) -> ScanGrid:
    """Evaluate ``zeta_e`` on an ``n_re x n_im`` grid of nodes spanning ``window``.

    With ``relative`` the tolerance at each node is ``tol * max(1, |zeta|)``,
    using a rough first pass for the magnitude; values in a scan range over
    hundreds of orders of magnitude near a barrier.  With ``evaluate=False``
    only the markers are computed (values are nan).
    """
    window, (n_re, n_im) = _check_window(window, res)
    requested = window[0]
    window, clipped = clip_window(window, barrier_of(e))
    re_axis = np.linspace(window[0], window[1], n_re)
    im_axis = np.linspace(window[2], window[3], n_im)
    pts = lattice_points(e, *window)
    near = proximal_mask(re_axis, im_axis, pts, guard)
    values = np.full((n_im, n_re), np.nan + 0j)
    bounds = np.full((n_im, n_re), np.nan)
    status = np.where(near, SINGULAR, 0)
    if evaluate:
        for j0 in range(0, n_im, _ROWS_PER_BLOCK):
            rows = slice(j0, min(j0 + _ROWS_PER_BLOCK, n_im))
            S = (re_axis[None, :] + 1j * im_axis[rows, None]).ravel()
            want = np.full(len(S), tol)
            if relative:
                rough, _, _ = eval_zeta_array(e, S, 1e-2, guard)
                want *= np.where(np.isfinite(rough), np.maximum(1.0, np.abs(rough)), 1.0)
            v, b, st = eval_zeta_array(e, S, want, guard)
            # cancellation can leave a bound above the request; keep the value, flag the cell
            keep = (st == 0) & np.isfinite(b)
            st = np.where((st == 0) & (b > want), UNCERTIFIED, st)
            values[rows] = np.where(keep, v, np.nan + 0j).reshape(-1, n_re)
            bounds[rows] = np.where(keep, b, np.nan).reshape(-1, n_re)
            blk = status[rows]
            status[rows] = np.where(blk == 0, st.reshape(-1, n_re), blk)
    return ScanGrid(window, (n_re, n_im), re_axis, im_axis, values, bounds, status, pts, clipped, requested)
