"""Reduced-space geometry: level curves, symplectic areas, return times.

Reducing any catalog system by its circle action at momentum level l leaves
a two-dimensional space with coordinates (z, phi) on which the Hamiltonian
takes the form A(z) + B(z) cos(phi).  Sublevel areas (actions, heights) and
orbit periods are one-dimensional quadratures in z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .catalog import System
from .errors import FiberRangeError, IntegrationError
from .phasespace import PLANE, SPHERE, PhasePoint, field_from_gradient

TWO_PI = 2.0 * math.pi


@dataclass
class ReducedLevel:
    """The reduced space of one system at one momentum level."""

    system: System
    l: float
    zlo: float
    zhi: float
    weight: float

    def __post_init__(self):
        self._model = self.system.reduced_model()

    def A(self, z):
        return self._model.A(z, self.l)

    def B(self, z):
        return np.abs(self._model.B(z, self.l))

    def envelope(self, z, sign):
        return self.A(z) + sign * self.B(z)

    # -- fiber measure -------------------------------------------------------

    def phi_measure(self, z, h):
        """Angular measure of {phi : A + |B| cos(phi) < h} at fixed z."""
        z = np.asarray(z, dtype=float)
        A, B = self.A(z), self.B(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = (h - A) / B
        w = np.where(B > 0, w, np.where(A < h, np.inf, -np.inf))
        w = np.clip(np.nan_to_num(w, nan=0.0, posinf=2.0, neginf=-2.0), -1.0, 1.0)
        return TWO_PI - 2.0 * np.arccos(w)

    def turning_points(self, h, n_scan=400):
        """z where the level curve h = A +- |B| turns around."""
        zs = np.linspace(self.zlo, self.zhi, n_scan)
        roots = []
        for sign in (+1.0, -1.0):
            f = self.envelope(zs, sign) - h
            for i in range(n_scan - 1):
                if f[i] == 0.0:
                    roots.append(zs[i])
                elif f[i] * f[i + 1] < 0:
                    roots.append(brentq(lambda z: float(self.envelope(z, sign) - h),
                                        zs[i], zs[i + 1], xtol=1e-14))
        return sorted(roots)

    def area_below(self, h) -> float:
        """Reduced symplectic area of {H_red < h}."""
        pts = [p for p in self.turning_points(h) if self.zlo < p < self.zhi]
        val, _err = quad(lambda z: float(self.phi_measure(z, h)),
                         self.zlo, self.zhi, points=pts or None,
                         limit=300, epsabs=1e-12, epsrel=1e-12)
        return self.weight * val

    def total_area(self) -> float:
        return self.weight * TWO_PI * (self.zhi - self.zlo)

    def h_range(self, n_scan=600):
        """(min, max) of the reduced Hamiltonian over the level."""
        zs = np.linspace(self.zlo, self.zhi, n_scan)
        lo_vals = self.envelope(zs, -1.0)
        hi_vals = self.envelope(zs, +1.0)
        i_lo, i_hi = int(np.argmin(lo_vals)), int(np.argmax(hi_vals))
        a, b = zs[max(i_lo - 1, 0)], zs[min(i_lo + 1, n_scan - 1)]
        r = minimize_scalar(lambda z: float(self.envelope(z, -1.0)), bounds=(a, b),
                            method="bounded", options={"xatol": 1e-12})
        h_min = min(float(r.fun), float(lo_vals[i_lo]))
        a, b = zs[max(i_hi - 1, 0)], zs[min(i_hi + 1, n_scan - 1)]
        r = minimize_scalar(lambda z: -float(self.envelope(z, +1.0)), bounds=(a, b),
                            method="bounded", options={"xatol": 1e-12})
        h_max = max(float(-r.fun), float(hi_vals[i_hi]))
        return h_min, h_max

    def oscillation_interval(self, h):
        """The z-interval swept by the connected level curve through h."""
        pts = self.turning_points(h)
        if len(pts) < 2:
            raise FiberRangeError(f"no level curve at (l={self.l:.6g}, h={h:.6g})")
        intervals = []
        for a, b in zip(pts[:-1], pts[1:]):
            zm = 0.5 * (a + b)
            if self.B(zm) > 0 and abs((h - self.A(zm)) / self.B(zm)) <= 1.0:
                intervals.append((a, b))
        if not intervals:
            raise FiberRangeError(f"empty fiber at (l={self.l:.6g}, h={h:.6g})")
        return intervals[0], len(intervals)

    def fiber_point(self, h) -> PhasePoint:
        (a, b), _n = self.oscillation_interval(h)
        zm = 0.5 * (a + b)
        w = float(np.clip((h - self.A(zm)) / self.B(zm), -1.0, 1.0))
        phi = math.acos(w)
        return self._model.fiber_point(zm, phi, self.l)


def reduced_level(system: System, l: float) -> ReducedLevel:
    model = system.reduced_model()
    lmin, lmax = model.l_range
    if not (lmin < l < lmax):
        raise FiberRangeError(f"momentum level {l:.6g} outside ({lmin:.6g}, {lmax:.6g})")
    zlo, zhi = model.z_range(l)
    if not zlo < zhi:
        raise FiberRangeError(f"empty reduced space at l={l:.6g}")
    return ReducedLevel(system, l, zlo, zhi, model.weight)


# -- area-method action -------------------------------------------------------

def area_action(system: System, l: float, h: float) -> float:
    """Second action from the sublevel symplectic area, normalized by 2 pi."""
    return reduced_level(system, l).area_below(h) / TWO_PI


def area_action_derivatives(system: System, l: float, h: float,
                            dl=2e-6, dh=2e-6):
    """(dI/dl, dI/dh) by central differences of the sublevel area."""
    Il = (area_action(system, l + dl, h) - area_action(system, l - dl, h)) / (2 * dl)
    Ih = (area_action(system, l, h + dh) - area_action(system, l, h - dh)) / (2 * dh)
    return Il, Ih


# -- flow-based return times ---------------------------------------------------

def invariant_coords(system: System, coords: np.ndarray) -> np.ndarray:
    """Circle-action invariants (z_1, C, S) embedding the reduced space."""
    m = system.manifold
    b0 = coords[m.block_slices[0]]
    b1 = coords[m.block_slices[1]]
    if m.factors[1] == SPHERE:
        C = b0[0] * b1[0] + b0[1] * b1[1]
        S = b0[0] * b1[1] - b0[1] * b1[0]
        return np.array([b0[2], C, S])
    C = b0[0] * b1[0] + b0[1] * b1[1]
    S = b0[0] * b1[1] - b0[1] * b1[0]
    return np.array([b0[2], C, S])


def return_times(system: System, l: float, h: float, tol: float = 1e-11,
                 t_cap: float = 4000.0):
    """First return of the H-flow to the starting circle orbit.

    Integrates the ambient flow of H with an auxiliary winding angle for the
    first factor; the return is detected on the invariant image of the
    reduced space.  Returns (tau1, tau2): the closing rotation and the
    elapsed H-time.
    """
    level = reduced_level(system, l)
    p0 = level.fiber_point(h)
    m = system.manifold
    sigma = m.global_sign
    x0 = np.concatenate([p0.coords, [0.0]])
    red0 = invariant_coords(system, p0.coords)

    def rhs(_t, y):
        coords = y[:-1]
        grad = system.H.gradient(PhasePoint(m, coords))
        vec = field_from_gradient(m, coords, grad)
        sl = m.block_slices[0]
        x, yy = coords[sl.start], coords[sl.start + 1]
        r2 = x * x + yy * yy
        theta_dot = (vec[sl.start + 1] * x - vec[sl.start] * yy) / r2 if r2 > 1e-14 else 0.0
        return np.concatenate([vec, [theta_dot]])

    v0 = rhs(0.0, x0)[:-1]
    dred = (invariant_coords(system, p0.coords + 1e-7 * v0)
            - invariant_coords(system, p0.coords - 1e-7 * v0)) / 2e-7
    nv = np.linalg.norm(dred)
    if nv < 1e-13:
        raise IntegrationError("reduced velocity vanishes; (l, h) too close to critical")
    dred /= nv

    def section(t, y):
        return float(dred @ (invariant_coords(system, y[:-1]) - red0))

    section.direction = 1.0
    section.terminal = True

    # lead-in: move off the section before arming event detection
    t_lead = min(1e-3 / nv, 0.01 * t_cap)
    sol = solve_ivp(rhs, (0.0, t_lead), x0, method="DOP853", rtol=tol, atol=tol * 1e-1)
    if not sol.success:
        raise IntegrationError(f"return-time flow failed in lead-in: {sol.message}")

    # integrate to the first same-direction section crossing; resume past any
    # crossing that is not geometrically close to the start
    t_now, y_now = t_lead, sol.y[:, -1]
    while t_now < t_cap:
        sol = solve_ivp(rhs, (t_now, t_cap), y_now, method="DOP853",
                        rtol=tol, atol=tol * 1e-1, events=section,
                        first_step=min(1e-3, t_cap / 1e6))
        if not sol.success and sol.status != 1:
            raise IntegrationError(f"return-time flow failed: {sol.message}")
        if sol.status != 1 or len(sol.t_events[0]) == 0:
            break
        te = float(sol.t_events[0][0])
        ye = sol.y_events[0][0]
        if te > 1e-10:
            dist = np.linalg.norm(invariant_coords(system, ye[:-1]) - red0)
            if dist < 1e-5:
                return -sigma * float(ye[-1]), te
        # false crossing: nudge forward and keep integrating
        t_now = te + max(1e-9, 1e-9 * te)
        y_now = ye
    raise IntegrationError(
        f"no return detected within time cap {t_cap:g} at (l={l:.6g}, h={h:.6g})")
