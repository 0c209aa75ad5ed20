"""The five symplectic invariants from actions on regular fibers.

Everything here rests on the bottom-anchored area action I(l, h): the
reduced sublevel area divided by 2 pi.  It is smooth away from upward
cuts at focus-focus values and away from the verticals through lower
boundary corners; the cartographic map corrects the latter by integer
shears measured from derivative jumps.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .catalog import System
from .errors import AccuracyError, FiberRangeError, TwistingError
from .normalform import EliassonMap, focus_focus_normal_form
from .reduced import (area_action, area_action_derivatives, reduced_level,
                      return_times)
from .singularities import (ELLIPTIC_ELLIPTIC, FOCUS_FOCUS, SingularityRecord,
                            count_focus_focus)

TWO_PI = 2.0 * math.pi


# -- singular model term -------------------------------------------------------

def singular_term(lp, j, eps=+1):
    """Im(z log z - z) for z = lp + i j, branch cut along the eps-vertical."""
    lp = np.asarray(lp, dtype=float)
    j = np.asarray(j, dtype=float)
    r = np.hypot(lp, j)
    th = np.arctan2(j, lp)
    if eps == +1:
        th = np.where(th > math.pi / 2 + 1e-15, th - TWO_PI, th)
    else:
        th = np.where(th < -math.pi / 2 - 1e-15, th + TWO_PI, th)
    with np.errstate(divide="ignore", invalid="ignore"):
        lnr = np.where(r > 0, np.log(r), 0.0)
    return lp * th + j * lnr - j


# -- action samples --------------------------------------------------------------

@dataclass
class ActionSample:
    l: float
    h: float
    I: float | None
    tau1: float
    tau2: float
    j: float | None = None
    method: str = "area"


def action_sample(system: System, l: float, h: float, method: str = "area",
                  emap: EliassonMap | None = None,
                  record: SingularityRecord | None = None) -> ActionSample:
    """One action datum at a regular value, by either method.

    "area": sublevel-area action and its derivatives (tau's by central
    differences).  "return-time": flow of H to first return, whose closing
    data is an independent period-lattice measurement; I is then defined
    only relative to a reference and is left unset here.
    """
    j = None
    if emap is not None and record is not None:
        lam, eta = record.critical_value
        j = float(emap.j_of(l - lam, h - eta))
    if method == "area":
        I = area_action(system, l, h)
        Il, Ih = area_action_derivatives(system, l, h)
        return ActionSample(l, h, I, TWO_PI * Il, TWO_PI * Ih, j, "area")
    if method == "return-time":
        tau1, tau2 = return_times(system, l, h)
        return ActionSample(l, h, None, tau1, tau2, j, "return-time")
    raise ValueError(f"unknown method {method!r}")


def _gauss_panel(f, a, b, n=10):
    x, w = np.polynomial.legendre.leggauss(n)
    xm, xr = 0.5 * (a + b), 0.5 * (b - a)
    return xr * sum(wi * f(xm + xr * xi) for xi, wi in zip(x, w))


def _composite_gauss(f, a, b, panel=0.25, n=10):
    if a == b:
        return 0.0
    m = max(1, int(math.ceil(abs(b - a) / panel)))
    edges = np.linspace(a, b, m + 1)
    return sum(_gauss_panel(f, u, v, n) for u, v in zip(edges[:-1], edges[1:]))


def reconstruct_action_flow(system: System, ref: tuple[float, float],
                            targets, cache: dict | None = None):
    """Return-time-method action at each target, anchored at ``ref``.

    The value I(ref) is shared with the area method (a single reference
    constant); the delta-cycle branch is fixed once at the reference by
    rounding the tau1 discrepancy to a multiple of 2 pi.  Everything else
    comes from flow-based return times integrated along L-shaped paths
    (l-leg at the reference height, then the h-leg), which must avoid
    critical curves.
    """
    l0, h0 = ref
    cache = cache if cache is not None else {}

    def taus(l, h):
        key = (round(l, 12), round(h, 12))
        if key not in cache:
            cache[key] = return_times(system, l, h)
        return cache[key]

    I_ref = area_action(system, l0, h0)
    Il_ref, _ = area_action_derivatives(system, l0, h0)
    branch = round((TWO_PI * Il_ref - taus(l0, h0)[0]) / TWO_PI)
    shift = TWO_PI * branch

    out = []
    for (l, h) in targets:
        leg1 = _composite_gauss(lambda s: taus(s, h0)[0] + shift, l0, l)
        leg2 = _composite_gauss(lambda s: taus(l, s)[1], h0, h)
        out.append(I_ref + (leg1 + leg2) / TWO_PI)
    return out


# -- Taylor series invariant ------------------------------------------------------

@dataclass
class TaylorInvariant:
    """Degree-2 coefficients of the regularized-action Taylor series."""

    s10: float
    s01: float
    s20: float
    s11: float
    s02: float
    I0: float
    eps: int
    s10_raw: float
    residual: float
    critical_value: tuple[float, float]
    cubic: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def series_value(self, lp, j):
        """Fitted polynomial S(l, j) on the raw branch, with cubic terms.

        Uses the raw (unreduced) linear-in-l coefficient: reconstruction of
        the action must pair S with the same logarithm determination the fit
        used, and only the pair is branch independent.
        """
        c30, c21, c12, c03 = self.cubic
        return (self.s10_raw * lp + self.s01 * j + self.s20 * lp ** 2
                + self.s11 * lp * j + self.s02 * j ** 2
                + c30 * lp ** 3 + c21 * lp ** 2 * j + c12 * lp * j ** 2 + c03 * j ** 3)

    def to_dict(self):
        return {"s10": self.s10, "s01": self.s01, "s20": self.s20,
                "s11": self.s11, "s02": self.s02,
                "branch": {"eps": self.eps, "s10_raw": self.s10_raw}}


def taylor_invariant(system: System, record: SingularityRecord,
                     emap: EliassonMap | None = None, delta: float = 0.02,
                     Delta: float = 0.2, n_r: int = 24, n_theta: int = 24,
                     eps: int = +1, N: int = 6,
                     residual_threshold: float = 1e-4) -> TaylorInvariant:
    """Fit the Taylor series invariant on an annulus around a FF value.

    Samples the area action on delta <= |z| <= Delta in normalized (l, j)
    coordinates, removes the universal singular term, and fits a polynomial
    by least squares.  Cubic terms are carried as nuisance parameters so the
    reported degree-2 coefficients are unbiased at O(|z|^2); s10 is reduced
    into [0, 2 pi).
    """
    if record.kind != FOCUS_FOCUS:
        raise ValueError("Taylor invariant requires a focus-focus record")
    system.check_not_near_degenerate()
    if emap is None:
        *_rest, emap = focus_focus_normal_form(system, record, N)
    lam, eta = record.critical_value

    # the sampled action must be the cartographic branch: remove any anchor
    # kink from a lower-boundary corner sharing the cut abscissa, and for a
    # downward cut remove the monodromy kink from the upward half-line
    h_lo, h_hi = reduced_level(system, lam).h_range()
    j_below = _derivative_jump(system, lam, eta - 0.4 * (eta - h_lo))
    m_corner = -round(j_below)
    if abs(j_below + m_corner) > 0.05:
        raise AccuracyError(f"non-integer anchor jump {j_below:.4f} at the cut")
    corr_slope = float(m_corner)
    if eps == -1:
        j_above = _derivative_jump(system, lam, eta + 0.4 * (h_hi - eta))
        mono = round(j_above) + m_corner
        corr_slope -= mono

    radii = np.linspace(delta, Delta, n_r)
    thetas = -math.pi + (np.arange(n_theta) + 0.5) * TWO_PI / n_theta
    rows, ys = [], []
    for r in radii:
        for th in thetas:
            lp, j = r * math.cos(th), r * math.sin(th)
            h = eta + float(emap.h_of(lp, j))
            I = area_action(system, lam + lp, h) + corr_slope * max(lp, 0.0)
            rows.append([1.0, lp, j, lp * lp, lp * j, j * j,
                         lp ** 3, lp * lp * j, lp * j * j, j ** 3])
            ys.append(TWO_PI * I + singular_term(lp, j, eps))
    A = np.array(rows)
    y = np.array(ys)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.abs(A @ coef - y).max())
    if resid > residual_threshold:
        raise AccuracyError(
            f"regularized fit residual {resid:.2e} exceeds {residual_threshold:.0e}; "
            "increase the normal-form degree or refine the annulus grid")
    s10_raw = float(coef[1])
    s10 = s10_raw % TWO_PI
    return TaylorInvariant(s10, float(coef[2]), float(coef[3]), float(coef[4]),
                           float(coef[5]), float(coef[0]) / TWO_PI, eps, s10_raw,
                           resid, (lam, eta), tuple(float(c) for c in coef[6:10]))


# -- height invariant ---------------------------------------------------------------

@dataclass
class HeightInvariant:
    value: float
    critical_value: tuple[float, float]


def height_invariant(system: System, record: SingularityRecord) -> HeightInvariant:
    """Normalized volume of the part of the critical fiber below the FF value."""
    if record.kind != FOCUS_FOCUS:
        raise ValueError("height invariant requires a focus-focus record")
    system.check_not_near_degenerate()
    lam, eta = record.critical_value
    return HeightInvariant(area_action(system, lam, eta), (lam, eta))


# -- cartographic polygon --------------------------------------------------------------

@dataclass
class PLCurve:
    """Piecewise-linear curve stored as knots; exact algebra under shears."""

    xs: list[float]
    ys: list[float]

    def value(self, x):
        return float(np.interp(x, self.xs, self.ys))

    def add_shear(self, s, x0):
        """y += s * max(x - x0, 0), inserting a knot at x0."""
        if not any(abs(x0 - x) < 1e-12 for x in self.xs):
            y0 = self.value(x0)
            idx = int(np.searchsorted(self.xs, x0))
            self.xs.insert(idx, x0)
            self.ys.insert(idx, y0)
        self.ys = [y + s * max(x - x0, 0.0) for x, y in zip(self.xs, self.ys)]

    def add_linear(self, s):
        self.ys = [y + s * x for x, y in zip(self.xs, self.ys)]

    def simplified(self, tol=1e-9):
        """Drop knots where the slope does not change."""
        xs, ys = self.xs, self.ys
        if len(xs) <= 2:
            return PLCurve(list(xs), list(ys))
        keep = [0]
        for i in range(1, len(xs) - 1):
            sl_l = (ys[i] - ys[keep[-1]]) / (xs[i] - xs[keep[-1]])
            sl_r = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
            if abs(sl_l - sl_r) > tol:
                keep.append(i)
        keep.append(len(xs) - 1)
        return PLCurve([xs[i] for i in keep], [ys[i] for i in keep])

    def copy(self):
        return PLCurve(list(self.xs), list(self.ys))


def _rationalize(x, tol=1e-5, max_den=64):
    fr = Fraction(x).limit_denominator(max_den)
    if abs(float(fr) - x) <= tol:
        return float(fr), True
    return x, False


@dataclass
class CutData:
    lam: float
    eta: float
    eps: int
    y_crit: float       # mu2 at the critical value, for rendering and height
    monodromy: int      # jump of d(mu2)/dl across the upward half-line


@dataclass
class SemitoricPolygon:
    """Polygon invariant data: vertices, cuts, signs, twisting indices.

    Carries its own generalized-toric second coordinate (``mu2``) so that
    the group actions (vertical shears, cut-sign flips) act consistently on
    the polygon, the cuts and the twisting indices.
    """

    vertices: list[tuple[float, float]]
    cuts: list[CutData]
    twisting: list[int] | None
    lower: PLCurve
    upper: PLCurve
    corrections: list[tuple[float, int]]
    shear: int = 0
    system: System = field(default=None, repr=False)
    rational: bool = True
    warning: str | None = None
    unbounded: bool = False

    @property
    def cut_abscissas(self):
        return [c.lam for c in self.cuts]

    @property
    def signs(self):
        return [c.eps for c in self.cuts]

    def mu2(self, l, h):
        """The cartographic second coordinate at a regular value."""
        val = area_action(self.system, l, h)
        for (lc, m) in self.corrections:
            val += m * max(l - lc, 0.0)
        for c in self.cuts:
            if c.eps == -1:
                val += (-c.monodromy) * max(l - c.lam, 0.0)
        val += self.shear * l
        return val

    def fiber_height(self, l):
        return self.upper.value(l) - self.lower.value(l)

    # -- group actions ------------------------------------------------------

    def apply_shear(self, m: int) -> "SemitoricPolygon":
        """Compose with T^m: (x, y) -> (x, y + m x)."""
        lower, upper = self.lower.copy(), self.upper.copy()
        lower.add_linear(m)
        upper.add_linear(m)
        cuts = [CutData(c.lam, c.eta, c.eps, c.y_crit + m * c.lam, c.monodromy)
                for c in self.cuts]
        tw = None if self.twisting is None else [k + m for k in self.twisting]
        return SemitoricPolygon(_vertices_from_curves(lower, upper)[0], cuts, tw,
                                lower, upper, list(self.corrections),
                                self.shear + m, self.system, self.rational,
                                self.warning, self.unbounded)

    def flip_sign(self, index: int) -> "SemitoricPolygon":
        """Flip the cut sign eps_r; the polygon changes only on l > lambda_r."""
        c = self.cuts[index]
        s = -c.monodromy if c.eps == +1 else c.monodromy
        lower, upper = self.lower.copy(), self.upper.copy()
        lower.add_shear(s, c.lam)
        upper.add_shear(s, c.lam)
        cuts = list(self.cuts)
        cuts[index] = CutData(c.lam, c.eta, -c.eps, c.y_crit, c.monodromy)
        return SemitoricPolygon(_vertices_from_curves(lower, upper)[0], cuts,
                                None if self.twisting is None else list(self.twisting),
                                lower, upper, list(self.corrections), self.shear,
                                self.system, self.rational, self.warning,
                                self.unbounded)

    def to_dict(self):
        return {
            "vertices": [[v[0], v[1]] for v in self.vertices],
            "cuts": [c.lam for c in self.cuts],
            "signs": [c.eps for c in self.cuts],
            "twisting": self.twisting,
        }


def _vertices_from_curves(lower: PLCurve, upper: PLCurve, rational_tol=1e-5):
    lo = lower.simplified()
    up = upper.simplified()
    ring = list(zip(lo.xs, lo.ys))
    top = list(zip(up.xs, up.ys))[::-1]
    if abs(ring[-1][0] - top[0][0]) < 1e-9 and abs(ring[-1][1] - top[0][1]) < 1e-7:
        top = top[1:]
    if top and abs(ring[0][0] - top[-1][0]) < 1e-9 and abs(ring[0][1] - top[-1][1]) < 1e-7:
        top = top[:-1]
    ring += top
    snapped, all_rational = [], True
    for (x, y) in ring:
        xr, okx = _rationalize(x, rational_tol)
        yr, oky = _rationalize(y, rational_tol)
        all_rational &= okx and oky
        snapped.append((xr, yr))
    return snapped, all_rational


def _derivative_jump(system: System, l0: float, h_star: float, dl=5e-3, fd=1e-5):
    """Jump of d(area action)/dl across the vertical through l0."""
    def dIdl(l):
        return (area_action(system, l + fd, h_star)
                - area_action(system, l - fd, h_star)) / (2 * fd)
    return dIdl(l0 + dl) - dIdl(l0 - dl)


def cartographic_polygon(system: System, signs=None, n_grid: int = 161,
                         l_window: tuple[float, float] | None = None,
                         records: list[SingularityRecord] | None = None,
                         seed: int = 0) -> SemitoricPolygon:
    """Straighten the momentum image into a rational polygon.

    The second coordinate is the bottom-anchored area action plus integer
    shear corrections: one per interior lower-boundary corner (measured from
    the derivative jump it inflicts on the anchor) and one per downward cut.
    Boundary curves are piecewise linear; vertices come from slope changes,
    then are snapped to nearby rationals (denominator <= 64, tolerance 1e-5).
    """
    system.check_not_near_degenerate()
    if records is None:
        _n, records = count_focus_focus(system, seed=seed)
    ff = [r for r in records if r.kind == FOCUS_FOCUS]
    ff.sort(key=lambda r: r.critical_value[0])
    if signs is None:
        signs = [+1] * len(ff)
    if len(signs) != len(ff) or any(s not in (-1, +1) for s in signs):
        raise ValueError("signs must be one of -1/+1 per focus-focus point")

    model = system.reduced_model()
    lmin, lmax = model.l_range
    unbounded = not math.isfinite(lmax)
    if l_window is not None:
        lmin, lmax = max(lmin, l_window[0]), min(lmax if not unbounded else math.inf, l_window[1])
    elif unbounded:
        lam_hi = max((r.critical_value[0] for r in records), default=0.0)
        lmax = lam_hi + 2.0 * (lam_hi - lmin if lam_hi > lmin else 1.0)
    span = lmax - lmin
    margin = 1e-7 * span

    # interior corners of the lower boundary: elliptic-elliptic values sitting
    # on the bottom of the image away from the l-endpoints
    corrections = []
    warning = None
    for r in records:
        if r.kind != ELLIPTIC_ELLIPTIC:
            continue
        lam_c, eta_c = r.critical_value
        if not (lmin + 1e-6 * span < lam_c < lmax - 1e-6 * span):
            continue
        lev = reduced_level(system, lam_c)
        h_lo, h_hi = lev.h_range()
        if abs(eta_c - h_lo) > abs(eta_c - h_hi):
            continue  # corner on the upper boundary: a legitimate vertex
        above = [f.critical_value[1] for f in ff
                 if abs(f.critical_value[0] - lam_c) < 1e-9]
        ceiling = min(above) if above else h_hi
        h_star = eta_c + 0.4 * (ceiling - eta_c)
        jump = _derivative_jump(system, lam_c, h_star)
        m = -round(jump)
        if abs(jump + m) > 0.05:
            warning = (f"non-integer anchor jump {jump:.4f} at l={lam_c:.6g}")
        if m != 0:
            corrections.append((lam_c, m))

    # monodromy jump across each upward half-line
    cuts = []
    for r, eps in zip(ff, signs):
        lam_r, eta_r = r.critical_value
        lev = reduced_level(system, lam_r)
        _h_lo, h_hi = lev.h_range()
        h_star = eta_r + 0.4 * (h_hi - eta_r)
        base_jump = _derivative_jump(system, lam_r, h_star)
        corr_here = sum(m for (lc, m) in corrections if abs(lc - lam_r) < 1e-9)
        mono = round(base_jump) + corr_here
        if abs(base_jump - round(base_jump)) > 0.05:
            warning = f"non-integer monodromy jump {base_jump:.4f} at l={lam_r:.6g}"
        y_crit = area_action(system, lam_r, eta_r) + sum(
            m * max(lam_r - lc, 0.0) for (lc, m) in corrections)
        cuts.append(CutData(lam_r, eta_r, eps, y_crit, mono))

    # upper boundary: total fiber area plus the corrections
    knot_cand = sorted({lmin, lmax}
                       | {lc for lc, _m in corrections}
                       | {c.lam for c in cuts}
                       | {r.critical_value[0] for r in records
                          if lmin + margin < r.critical_value[0] < lmax - margin})
    ls = np.unique(np.concatenate([
        np.linspace(lmin + margin, lmax - margin, n_grid),
        [min(max(k, lmin + margin), lmax - margin) for k in knot_cand]]))
    tot = np.array([reduced_level(system, l).total_area() / TWO_PI for l in ls])
    for (lc, m) in corrections:
        tot += m * np.maximum(ls - lc, 0.0)

    # fit one line per interval between candidate knots and intersect them
    def segment_fits(vals):
        segs = []
        for a, b in zip(knot_cand[:-1], knot_cand[1:]):
            inner = (ls > a + 1e-4 * span) & (ls < b - 1e-4 * span)
            if inner.sum() < 2:
                inner = (ls >= a) & (ls <= b)
            A = np.vstack([ls[inner], np.ones(inner.sum())]).T
            coef, *_ = np.linalg.lstsq(A, vals[inner], rcond=None)
            segs.append((a, b, float(coef[0]), float(coef[1])))
        return segs

    segs = segment_fits(tot)
    xs_up, ys_up = [lmin], [segs[0][2] * lmin + segs[0][3]]
    for (sa, sb, m1, c1), (_sa2, _sb2, m2, c2) in zip(segs[:-1], segs[1:]):
        if abs(m1 - m2) < 1e-7:
            continue
        xk = (c2 - c1) / (m1 - m2)
        xk = min(max(xk, sb - 0.05 * span), sb + 0.05 * span)
        xs_up.append(xk)
        ys_up.append(m1 * xk + c1)
    xs_up.append(lmax)
    ys_up.append(segs[-1][2] * lmax + segs[-1][3])
    upper = PLCurve(xs_up, ys_up)

    lower = PLCurve([lmin, lmax], [0.0, 0.0])
    for (lc, m) in corrections:
        lower.add_shear(m, lc)
    for c in cuts:
        if c.eps == -1:
            lower.add_shear(-c.monodromy, c.lam)
            upper.add_shear(-c.monodromy, c.lam)

    vertices, rational = _vertices_from_curves(lower, upper)
    return SemitoricPolygon(vertices, cuts, None, lower, upper, corrections,
                            0, system, rational, warning, unbounded)


# -- twisting index ---------------------------------------------------------------

def privileged_action(taylor: TaylorInvariant, lp, j):
    """The local action nu2 rebuilt from the regularized model."""
    return taylor.I0 + (-singular_term(lp, j, taylor.eps)
                        + taylor.series_value(lp, j)) / TWO_PI


def twisting_index(system: System, polygon: SemitoricPolygon,
                   record: SingularityRecord, emap: EliassonMap,
                   taylor: TaylorInvariant, radii=(0.015, 0.05),
                   n_r: int = 5, n_theta: int = 16,
                   residual_threshold: float = 1e-4) -> int:
    """Integer shear relating the polygon's momentum map to the local one.

    Samples mu2 - nu2 on a small punctured neighborhood of the focus-focus
    value, where nu2 is rebuilt from the singular term and the fitted Taylor
    polynomial; both are actions with the same cut, so the difference must
    be k*l + c with integer k.
    """
    lam, eta = record.critical_value
    cut = min(polygon.cuts, key=lambda c: abs(c.lam - lam))
    if abs(cut.lam - lam) > 1e-6:
        raise TwistingError("record does not match any polygon cut")
    if taylor.eps != cut.eps:
        raise TwistingError("Taylor data was fitted with a different cut sign")

    thetas = -math.pi + (np.arange(n_theta) + 0.5) * TWO_PI / n_theta
    rows, diffs = [], []
    for r in np.linspace(radii[0], radii[1], n_r):
        for th in thetas:
            lp, j = r * math.cos(th), r * math.sin(th)
            h = eta + float(emap.h_of(lp, j))
            mu2 = polygon.mu2(lam + lp, h)
            nu2 = privileged_action(taylor, lp, j)
            rows.append([lp, 1.0])
            diffs.append(mu2 - nu2)
    A = np.array(rows)
    d = np.array(diffs)
    coef, *_ = np.linalg.lstsq(A, d, rcond=None)
    k_hat = float(coef[0])
    k = round(k_hat)
    if abs(k_hat - k) > 0.1:
        raise TwistingError(f"no integer within 0.1 of the fitted shear {k_hat:.4f}")
    c_star = float(np.mean(d - k * A[:, 0]))  # refit the constant with k frozen
    resid = float(np.abs(d - k * A[:, 0] - c_star).max())
    if resid > residual_threshold:
        raise TwistingError(
            f"twisting residual {resid:.2e} exceeds {residual_threshold:.0e}")
    return k


def attach_twisting(system: System, polygon: SemitoricPolygon,
                    records: list[SingularityRecord], nf_cache: dict | None = None,
                    taylor_kwargs: dict | None = None) -> SemitoricPolygon:
    """Compute and store the twisting index of every cut on the polygon."""
    taylor_kwargs = taylor_kwargs or {}
    ff = sorted([r for r in records if r.kind == FOCUS_FOCUS],
                key=lambda r: r.critical_value[0])
    ks = []
    for r, cut in zip(ff, polygon.cuts):
        key = round(r.critical_value[0], 9)
        if nf_cache is not None and key in nf_cache:
            emap = nf_cache[key]
        else:
            *_rest, emap = focus_focus_normal_form(system, r)
            if nf_cache is not None:
                nf_cache[key] = emap
        taylor = taylor_invariant(system, r, emap=emap, eps=cut.eps, **taylor_kwargs)
        ks.append(twisting_index(system, polygon, r, emap, taylor))
    polygon.twisting = ks
    return polygon


# -- JSON document -------------------------------------------------------------------

def invariants_document(system: System, seed: int = 0,
                        taylor_kwargs: dict | None = None,
                        polygon_kwargs: dict | None = None) -> dict:
    """All five invariants of a system instance as one JSON-ready document."""
    system.check_not_near_degenerate()
    taylor_kwargs = taylor_kwargs or {}
    polygon_kwargs = polygon_kwargs or {}
    n_ff, records = count_focus_focus(system, seed=seed)
    doc = {
        "schema": "semitoric-invariants/1",
        "family": system.family,
        "params": system.params,
        "n_ff": n_ff,
    }
    ff = sorted([r for r in records if r.kind == FOCUS_FOCUS],
                key=lambda r: r.critical_value[0])
    polygon = cartographic_polygon(system, records=records, **polygon_kwargs)
    if ff:
        taylors, heights, emaps = [], [], {}
        for r in ff:
            *_rest, emap = focus_focus_normal_form(system, r)
            emaps[round(r.critical_value[0], 9)] = emap
            taylors.append(taylor_invariant(system, r, emap=emap, **taylor_kwargs))
            heights.append(height_invariant(system, r).value)
        attach_twisting(system, polygon, records, nf_cache=emaps,
                        taylor_kwargs=taylor_kwargs)
        doc["taylor"] = taylors[0].to_dict() if n_ff == 1 else [t.to_dict() for t in taylors]
        doc["height"] = heights
    doc["polygon"] = polygon.to_dict()
    return doc
