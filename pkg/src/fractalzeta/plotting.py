"""Figures written next to the CLI's delimited output (Agg backend, files only)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_scan", "plot_singularities", "plot_counting", "save"]

_META = {"Software": None}  # keeps repeated renders byte-identical


def save(fig, path):
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata=_META if str(path).endswith(".png") else None)
    plt.close(fig)


def plot_scan(grid, path, barrier=None):
    """Heat map of log|zeta| over the scan window with singular points on top."""
    re, im = grid["re_axis"], grid["im_axis"]
    z = np.asarray(grid["log_abs"], dtype=float).reshape(len(im), len(re))
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    finite = z[np.isfinite(z)]
    vmax = np.percentile(finite, 98) if finite.size else 1.0
    vmin = np.percentile(finite, 2) if finite.size else 0.0
    mesh = ax.pcolormesh(re, im, np.ma.masked_invalid(z), shading="nearest", cmap="viridis", vmin=vmin, vmax=vmax)
    fig.colorbar(mesh, ax=ax, label=r"$\log|\zeta(s)|$")
    pts = grid.get("singularities", [])
    if pts:
        ax.scatter([p[0].real for p in pts], [p[0].imag for p in pts], s=14, c="red", marker="x", label="singular points")
        ax.legend(loc="upper right", fontsize=8)
    if barrier is not None and re[0] - (re[1] - re[0]) <= barrier:
        ax.axvline(barrier, color="white", ls="--", lw=1)
    ax.set_xlabel(r"Re $s$")
    ax.set_ylabel(r"Im $s$")
    save(fig, path)


def plot_singularities(p, path, re_min=None, im_max=20.0):
    """Singular points of a constructed string accumulating at its barrier."""
    from .prescriber import singularities_in_window

    lo = re_min if re_min is not None else p.d_inf + 0.02 * (p.d1 - p.d_inf)
    hi = max(p.d, p.d1) + 0.05
    pts = singularities_in_window(p, lo, hi, -im_max, im_max)
    fig, ax = plt.subplots(figsize=(5.0, 6.0))
    ess = [z for z, k in pts if k == "essential"]
    poles = [z for z, k in pts if k != "essential"]
    ax.scatter([z.real for z in ess], [z.imag for z in ess], s=6, c="k", label="essential")
    if poles:
        ax.scatter([z.real for z in poles], [z.imag for z in poles], s=16, c="tab:red", marker="o", label="pole")
    ax.axvline(p.d_inf, color="tab:blue", ls="--", lw=1, label=f"barrier Re s = {p.d_inf:g}")
    ax.set_xlim(p.d_inf - 0.05, hi)
    ax.set_ylim(-im_max, im_max)
    ax.set_xlabel(r"Re $s$")
    ax.set_ylabel(r"Im $s$")
    ax.legend(loc="lower right", fontsize=8)
    save(fig, path)


def plot_counting(terms, exact, estimate, path):
    """log N(lambda) against log(1/lambda) with the fitted and exact slopes."""
    lengths = np.array([t.length for t in terms])
    counts = np.cumsum([t.multiplicity for t in terms], dtype=float)
    x, y = -np.log(lengths), np.log(counts)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(x, y, ".", ms=3, label=r"$\log N(\lambda)$")
    if estimate is not None and len(x):
        x0 = x[len(x) // 2]
        y0 = y[len(x) // 2]
        ax.plot(x, y0 + estimate * (x - x0), "-", lw=1, label=f"fit slope {estimate:.4f}")
        if exact is not None and math.isfinite(exact):
            ax.plot(x, y0 + exact * (x - x0), "--", lw=1, label=f"exact {exact:.4f}")
    ax.set_xlabel(r"$\log(1/\lambda)$")
    ax.set_ylabel(r"$\log N(\lambda)$")
    ax.legend(fontsize=8)
    save(fig, path)
