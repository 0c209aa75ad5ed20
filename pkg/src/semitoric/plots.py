"""Matplotlib figure rendering for momentum images, polygons, region maps.

All figures are written to files (SVG by default).  Rendering is
deterministic: a fixed hash salt and no date metadata, so identical inputs
produce identical files.
"""
from __future__ import annotations

import math
from contextlib import contextmanager

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .catalog import System, hirzebruch_toric_polygon
from .reduced import reduced_level
from .singularities import (DEGENERATE, ELLIPTIC_ELLIPTIC, FOCUS_FOCUS,
                            RegionMap, count_focus_focus)

_SAVEFIG_META = {"Date": None}


@contextmanager
def _deterministic_rc():
    with matplotlib.rc_context({"svg.hashsalt": "semitoric",
                                "figure.figsize": (5.0, 4.0),
                                "font.size": 9}):
        yield


def _save(fig, path):
    fmt = str(path).rsplit(".", 1)[-1].lower()
    if fmt == "svg":
        fig.savefig(path, metadata=_SAVEFIG_META)
    else:
        fig.savefig(path)
    plt.close(fig)
    return str(path)


def momentum_image(system: System, path, n_l: int = 200, records=None):
    """Image of the momentum map: boundary curves plus critical values.

    Elliptic-elliptic values sit on the boundary, focus-focus values are
    interior dots.
    """
    model = system.reduced_model()
    lmin, lmax = model.l_range
    if not math.isfinite(lmax):
        lmax = 4.0 + lmin
    eps = 1e-6 * (lmax - lmin)
    ls = np.linspace(lmin + eps, lmax - eps, n_l)
    los, his = [], []
    for l in ls:
        lo, hi = reduced_level(system, float(l)).h_range(n_scan=200)
        los.append(lo)
        his.append(hi)
    if records is None:
        _n, records = count_focus_focus(system)
    with _deterministic_rc():
        fig, ax = plt.subplots()
        ax.fill_between(ls, los, his, color="0.92", lw=0)
        ax.plot(ls, los, "k-", lw=1.0)
        ax.plot(ls, his, "k-", lw=1.0)
        for rec in records:
            lam, eta = rec.critical_value
            if rec.kind == FOCUS_FOCUS:
                ax.plot([lam], [eta], "o", color="0.1", ms=5)
            elif rec.kind == ELLIPTIC_ELLIPTIC:
                ax.plot([lam], [eta], "o", mfc="white", mec="0.1", ms=5)
            else:
                ax.plot([lam], [eta], "s", color="0.4", ms=5)
        ax.set_xlabel("L")
        ax.set_ylabel("H")
        ax.set_title(repr(system), fontsize=8)
        return _save(fig, path)


def polygon_figure(polygon, path, title=None):
    """Polygon representative with dashed vertical cut half-lines."""
    verts = polygon.vertices
    with _deterministic_rc():
        fig, ax = plt.subplots()
        xs = [v[0] for v in verts] + [verts[0][0]]
        ys = [v[1] for v in verts] + [verts[0][1]]
        ax.fill(xs, ys, color="0.92", lw=0)
        ax.plot(xs, ys, "k-", lw=1.2)
        for cut, k in zip(polygon.cuts, polygon.twisting or [None] * len(polygon.cuts)):
            y_end = (polygon.upper.value(cut.lam) if cut.eps == +1
                     else polygon.lower.value(cut.lam))
            ax.plot([cut.lam, cut.lam], [cut.y_crit, y_end], "k--", lw=1.0)
            ax.plot([cut.lam], [cut.y_crit], "x", color="0.1", ms=6)
            label = f"eps={cut.eps:+d}" + (f", k={k}" if k is not None else "")
            ax.annotate(label, (cut.lam, cut.y_crit), textcoords="offset points",
                        xytext=(4, 4), fontsize=7)
        ax.set_xlabel("l")
        ax.set_ylabel("second action")
        if title:
            ax.set_title(title, fontsize=8)
        ax.set_aspect("equal", adjustable="datalim")
        return _save(fig, path)


def toric_polygon_figure(n, alpha, beta, path):
    """Delzant trapezoid of the standard toric system on a Hirzebruch surface."""
    verts = hirzebruch_toric_polygon(n, alpha, beta)
    with _deterministic_rc():
        fig, ax = plt.subplots()
        xs = [v[0] for v in verts] + [verts[0][0]]
        ys = [v[1] for v in verts] + [verts[0][1]]
        ax.fill(xs, ys, color="0.92", lw=0)
        ax.plot(xs, ys, "k-", lw=1.2)
        ax.set_xlabel("L")
        ax.set_ylabel("H")
        ax.set_title(f"toric polygon n={n}, alpha={alpha:g}, beta={beta:g}", fontsize=8)
        ax.set_aspect("equal", adjustable="datalim")
        return _save(fig, path)


def region_map_figure(rmap: RegionMap, path):
    """Three-tone focus-focus count over the coupling square."""
    with _deterministic_rc():
        fig, ax = plt.subplots()
        cmap = matplotlib.colors.ListedColormap(["white", "0.75", "0.35"])
        norm = matplotlib.colors.BoundaryNorm([-0.5, 0.5, 1.5, 2.5], cmap.N)
        ax.pcolormesh(rmap.s1, rmap.s2, rmap.counts, cmap=cmap, norm=norm,
                      shading="nearest")
        if rmap.boundary:
            bx = [p[0] for p in rmap.boundary]
            by = [p[1] for p in rmap.boundary]
            ax.plot(bx, by, ".", color="k", ms=1.5)
        ax.set_xlabel("s1")
        ax.set_ylabel("s2")
        ax.set_title("number of focus-focus points", fontsize=8)
        ax.set_aspect("equal")
        return _save(fig, path)
