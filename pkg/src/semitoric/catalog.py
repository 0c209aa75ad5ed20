"""Explicit semitoric system families with closed-form observables.

Three families carry dynamics: the coupled spin-oscillator on S^2 x R^2,
the coupled angular momenta on S^2 x S^2, and a two-parameter deformation
of the latter that can host two focus-focus points.  Hirzebruch-surface
systems are covered at formula level only (transition times and the toric
polygon); their reduced phase spaces are deliberately not implemented.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ManifoldMismatchError, NearDegenerateError
from .phasespace import (PLANE, SPHERE, ClosedFormObservable,
                         LinearCombinationObservable, ManifoldDescriptor,
                         PhasePoint)

DEGENERACY_MARGIN = 1e-6


@dataclass
class ReducedModel:
    """S^1-reduced description of a catalog system at momentum level l.

    On every family the reduced Hamiltonian has the form A(z) + B(z)*cos(phi)
    on a (z, phi) cylinder, where z is the first-factor vertical coordinate
    (sphere z) and phi is the relative angle.  ``weight`` is the density of
    the reduced symplectic area with respect to dz dphi.
    """

    weight: float
    l_range: tuple[float, float]
    z_range: callable  # l -> (zlo, zhi)
    A: callable        # (z, l) -> array
    B: callable        # (z, l) -> array, signed; |B| is the cosine amplitude
    fiber_point: callable  # (z, phi, l) -> PhasePoint


class System:
    """Base for catalog systems: manifold + closed-form L, H."""

    family = "system"
    manifold: ManifoldDescriptor
    L = None
    H = None

    def evaluate(self, p: PhasePoint):
        if p.manifold != self.manifold:
            raise ManifoldMismatchError("point is not on this system's manifold")
        return self.L.value(p), self.H.value(p)

    def observable(self, a: float, b: float):
        """The combination a*L + b*H."""
        return LinearCombinationObservable(a, self.L, b, self.H)

    def expressions(self, ambient):
        """L and H applied to arbitrary ring elements (floats or series)."""
        raise NotImplementedError

    def reduced_model(self) -> ReducedModel:
        raise NotImplementedError

    def check_not_near_degenerate(self):
        """Raise when parameters sit within margin of a known transition."""
        return None

    @property
    def params(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{type(self).__name__}({ps})"


class CoupledSpinOscillator(System):
    """Spin-oscillator on S^2 x R^2 with weights rho1, rho2.

    L = rho1 (z - 1) + rho2 (u^2 + v^2) / 2,  H = (x u + y v) / 2.
    """

    family = "cso"

    def __init__(self, rho1=1.0, rho2=1.0):
        if rho1 <= 0 or rho2 <= 0:
            raise ValueError("weights must be positive")
        self.rho1, self.rho2 = float(rho1), float(rho2)
        self.manifold = ManifoldDescriptor((SPHERE, PLANE), (self.rho1, self.rho2), +1)
        r1, r2 = self.rho1, self.rho2
        self.L = ClosedFormObservable(
            "L",
            lambda c: r1 * (c[2] - 1.0) + 0.5 * r2 * (c[3] ** 2 + c[4] ** 2),
            lambda c: np.array([0.0, 0.0, r1, r2 * c[3], r2 * c[4]]),
            lambda c: np.diag([0.0, 0.0, 0.0, r2, r2]),
        )

        def h_hess(_c):
            M = np.zeros((5, 5))
            M[0, 3] = M[3, 0] = 0.5
            M[1, 4] = M[4, 1] = 0.5
            return M

        self.H = ClosedFormObservable(
            "H",
            lambda c: 0.5 * (c[0] * c[3] + c[1] * c[4]),
            lambda c: 0.5 * np.array([c[3], c[4], 0.0, c[0], c[1]]),
            h_hess,
        )

    @property
    def params(self):
        return {"rho1": self.rho1, "rho2": self.rho2}

    def expressions(self, amb):
        x, y, z, u, v = amb
        L = self.rho1 * (z - 1.0) + 0.5 * self.rho2 * (u * u + v * v)
        H = 0.5 * (x * u + y * v)
        return L, H

    def reduced_model(self):
        r1, r2 = self.rho1, self.rho2

        def z_range(l):
            return (-1.0, min(1.0, 1.0 + l / r1))

        def rsq(z, l):
            return 2.0 * (l - r1 * (np.asarray(z) - 1.0)) / r2

        def A(z, l):
            return np.zeros_like(np.asarray(z, dtype=float))

        def B(z, l):
            z = np.asarray(z, dtype=float)
            return 0.5 * np.sqrt(np.maximum(1.0 - z * z, 0.0)) * np.sqrt(np.maximum(rsq(z, l), 0.0))

        def fiber_point(z, phi, l):
            r = math.sqrt(max(rsq(z, l), 0.0))
            s = math.sqrt(max(1.0 - z * z, 0.0))
            return PhasePoint(self.manifold,
                              [s, 0.0, z, r * math.cos(phi), r * math.sin(phi)])

        return ReducedModel(r1, (-2.0 * r1, math.inf), z_range, A, B, fiber_point)


class CoupledAngularMomenta(System):
    """Coupled angular momenta on S^2 x S^2, weights R1, R2, coupling t.

    L = R1 (z1 - 1) + R2 (z2 + 1),
    H = (1 - t) z1 + t (x1 x2 + y1 y2 + z1 z2) + 2 t - 1.
    """

    family = "cam"

    def __init__(self, R1=1.0, R2=1.0, t=0.5):
        if R1 <= 0 or R2 <= 0:
            raise ValueError("weights must be positive")
        self.R1, self.R2, self.t = float(R1), float(R2), float(t)
        self.manifold = ManifoldDescriptor((SPHERE, SPHERE), (self.R1, self.R2), -1)
        R1, R2, t = self.R1, self.R2, self.t
        self.L = ClosedFormObservable(
            "L",
            lambda c: R1 * (c[2] - 1.0) + R2 * (c[5] + 1.0),
            lambda c: np.array([0.0, 0.0, R1, 0.0, 0.0, R2]),
            lambda c: np.zeros((6, 6)),
        )

        def h_val(c):
            return ((1 - t) * c[2]
                    + t * (c[0] * c[3] + c[1] * c[4] + c[2] * c[5]) + 2 * t - 1)

        def h_grad(c):
            return np.array([t * c[3], t * c[4], (1 - t) + t * c[5],
                             t * c[0], t * c[1], t * c[2]])

        def h_hess(_c):
            M = np.zeros((6, 6))
            M[:3, 3:] = t * np.eye(3)
            M[3:, :3] = t * np.eye(3)
            return M

        self.H = ClosedFormObservable("H", h_val, h_grad, h_hess)

    @property
    def params(self):
        return {"R1": self.R1, "R2": self.R2, "t": self.t}

    def expressions(self, amb):
        x1, y1, z1, x2, y2, z2 = amb
        t = self.t
        L = self.R1 * (z1 - 1.0) + self.R2 * (z2 + 1.0)
        H = (1 - t) * z1 + t * (x1 * x2 + y1 * y2 + z1 * z2) + (2 * t - 1.0)
        return L, H

    def transition_times(self):
        return cam_transition_times(self.R1, self.R2)

    def check_not_near_degenerate(self):
        tm, tp = self.transition_times()
        if min(abs(self.t - tm), abs(self.t - tp)) <= DEGENERACY_MARGIN:
            raise NearDegenerateError(
                f"t={self.t} within {DEGENERACY_MARGIN:g} of a transition time "
                f"(t-={tm:.8f}, t+={tp:.8f})")

    def reduced_model(self):
        R1, R2, t = self.R1, self.R2, self.t

        def z2_of(z, l):
            return (l - R1 * (np.asarray(z, dtype=float) - 1.0)) / R2 - 1.0

        def z_range(l):
            return (max(-1.0, 1.0 + (l - 2.0 * R2) / R1), min(1.0, 1.0 + l / R1))

        def A(z, l):
            z = np.asarray(z, dtype=float)
            z2 = z2_of(z, l)
            return (1 - t) * z + t * z * z2 + (2 * t - 1.0)

        def B(z, l):
            z = np.asarray(z, dtype=float)
            z2 = z2_of(z, l)
            return t * np.sqrt(np.maximum(1 - z * z, 0.0) * np.maximum(1 - z2 * z2, 0.0))

        def fiber_point(z, phi, l):
            z2 = float(z2_of(z, l))
            s1 = math.sqrt(max(1.0 - z * z, 0.0))
            s2 = math.sqrt(max(1.0 - z2 * z2, 0.0))
            return PhasePoint(self.manifold,
                              [s1, 0.0, z, s2 * math.cos(phi), s2 * math.sin(phi), z2])

        return ReducedModel(R1, (-2.0 * R1, 2.0 * R2), z_range, A, B, fiber_point)


class TwoFocusFamily(System):
    """Two-parameter deformation of the coupled angular momenta.

    L = R1 z1 + R2 z2 and H interpolates between two couplings with
    parameters (s1, s2) in the unit square; up to two focus-focus points.
    """

    family = "twoff"

    def __init__(self, R1=1.0, R2=2.0, s1=0.5, s2=0.0):
        if not (0 < R1 < R2):
            raise ValueError("need 0 < R1 < R2")
        if not (0 <= s1 <= 1 and 0 <= s2 <= 1):
            raise ValueError("(s1, s2) must lie in the unit square")
        self.R1, self.R2 = float(R1), float(R2)
        self.s1, self.s2 = float(s1), float(s2)
        self.manifold = ManifoldDescriptor((SPHERE, SPHERE), (self.R1, self.R2), -1)
        R1, R2 = self.R1, self.R2
        a = (1 - self.s1) * (1 - self.s2)
        b = self.s1 * self.s2
        gs = self.s1 * (1 - self.s2) + self.s2 * (1 - self.s1)
        gd = self.s1 * (1 - self.s2) - self.s2 * (1 - self.s1)
        self._abgg = (a, b, gs, gd)
        self.L = ClosedFormObservable(
            "L",
            lambda c: R1 * c[2] + R2 * c[5],
            lambda c: np.array([0.0, 0.0, R1, 0.0, 0.0, R2]),
            lambda c: np.zeros((6, 6)),
        )

        def h_val(c):
            return (a * c[2] + b * c[5]
                    + gs * (c[0] * c[3] + c[1] * c[4]) + gd * c[2] * c[5])

        def h_grad(c):
            return np.array([gs * c[3], gs * c[4], a + gd * c[5],
                             gs * c[0], gs * c[1], b + gd * c[2]])

        def h_hess(_c):
            M = np.zeros((6, 6))
            M[:3, 3:] = np.diag([gs, gs, gd])
            M[3:, :3] = np.diag([gs, gs, gd])
            return M

        self.H = ClosedFormObservable("H", h_val, h_grad, h_hess)

    @property
    def params(self):
        return {"R1": self.R1, "R2": self.R2, "s1": self.s1, "s2": self.s2}

    def expressions(self, amb):
        x1, y1, z1, x2, y2, z2 = amb
        a, b, gs, gd = self._abgg
        L = self.R1 * z1 + self.R2 * z2
        H = a * z1 + b * z2 + gs * (x1 * x2 + y1 * y2) + gd * (z1 * z2)
        return L, H

    def reduced_model(self):
        R1, R2 = self.R1, self.R2
        a, b, gs, gd = self._abgg

        def z2_of(z, l):
            return (l - R1 * np.asarray(z, dtype=float)) / R2

        def z_range(l):
            return (max(-1.0, (l - R2) / R1), min(1.0, (l + R2) / R1))

        def A(z, l):
            z = np.asarray(z, dtype=float)
            z2 = z2_of(z, l)
            return a * z + b * z2 + gd * z * z2

        def B(z, l):
            z = np.asarray(z, dtype=float)
            z2 = z2_of(z, l)
            return gs * np.sqrt(np.maximum(1 - z * z, 0.0) * np.maximum(1 - z2 * z2, 0.0))

        def fiber_point(z, phi, l):
            z2 = float(z2_of(z, l))
            s1 = math.sqrt(max(1.0 - z * z, 0.0))
            s2 = math.sqrt(max(1.0 - z2 * z2, 0.0))
            return PhasePoint(self.manifold,
                              [s1, 0.0, z, s2 * math.cos(phi), s2 * math.sin(phi), z2])

        return ReducedModel(R1, (-(R1 + R2), R1 + R2), z_range, A, B, fiber_point)


# -- closed-form reference quantities ----------------------------------------

def cam_transition_times(R1: float, R2: float) -> tuple[float, float]:
    """Coupling values bounding the focus-focus window of the angular momenta.

    t_pm = R2 / (2 R2 + R1 -/+ 2 sqrt(R1 R2)); always 0 < t- < t+, and
    t+ >= 1 exactly in the equal-weight case.
    """
    if R1 <= 0 or R2 <= 0:
        raise ValueError("weights must be positive")
    s = 2.0 * math.sqrt(R1 * R2)
    tm = R2 / (2.0 * R2 + R1 + s)
    tp = R2 / (2.0 * R2 + R1 - s)
    return tm, tp


def cam_upper_time_at_boundary(R1: float, R2: float) -> bool:
    """True when the upper transition time reaches or exceeds 1."""
    return cam_transition_times(R1, R2)[1] >= 1.0


def hirzebruch_transition_times(kind: str, alpha: float, beta: float,
                                gamma: float) -> tuple[float, float]:
    """Transition times of the explicit families on the first two surfaces.

    kind "W1": t_pm = 1 / (2 (1 -/+ gamma sqrt(2 beta))),
               valid for 0 < gamma < 1 / (2 sqrt(2 beta)).
    kind "W2": with nu = beta/alpha and c = 2 gamma sqrt(nu),
               t_pm = (1 + 2 nu) / (1 + (3 +/- c) nu), valid for
               0 < gamma < 1 / (2 nu).
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha, beta must be positive")
    kind = kind.upper()
    if kind == "W1":
        g = gamma * math.sqrt(2.0 * beta)
        if not 0.0 < g < 0.5:
            raise ValueError("need 0 < gamma < 1/(2 sqrt(2 beta)) for W1")
        return 1.0 / (2.0 * (1.0 + g)), 1.0 / (2.0 * (1.0 - g))
    if kind == "W2":
        nu = beta / alpha
        if not 0.0 < gamma < 1.0 / (2.0 * nu):
            raise ValueError("need 0 < gamma < 1/(2 nu) for W2")
        c = 2.0 * gamma * math.sqrt(nu)
        return (1.0 + 2.0 * nu) / (1.0 + (3.0 + c) * nu), \
               (1.0 + 2.0 * nu) / (1.0 + (3.0 - c) * nu)
    raise ValueError(f"unknown Hirzebruch kind {kind!r}")


def hirzebruch_toric_polygon(n: int, alpha: float, beta: float):
    """Delzant polygon of the standard toric system on the n-th surface.

    Eliminating the nonnegative moduli from the zero-level constraints of
    the reduction map leaves 0 <= y <= beta, 0 <= x <= alpha + n(beta - y),
    a trapezoid with the vertices below.
    """
    if n < 0 or alpha <= 0 or beta <= 0:
        raise ValueError("need n >= 0 and alpha, beta > 0")
    return [(0.0, 0.0), (alpha + n * beta, 0.0), (alpha, beta), (0.0, beta)]


FAMILIES = {
    "cso": (CoupledSpinOscillator, ("rho1", "rho2")),
    "cam": (CoupledAngularMomenta, ("R1", "R2", "t")),
    "twoff": (TwoFocusFamily, ("R1", "R2", "s1", "s2")),
}


def make_system(family: str, **params) -> System:
    """CLI-facing factory: build a system by family name and parameters."""
    key = family.lower()
    if key not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    cls, names = FAMILIES[key]
    unknown = set(params) - set(names)
    if unknown:
        raise ValueError(f"unknown parameters for {key}: {sorted(unknown)}")
    return cls(**params)
