"""Product phase spaces, Hamiltonian vector fields, brackets, flows.

Supported factors are unit spheres (coordinates x, y, z) and planes
(coordinates u, v), each carrying a positive symplectic weight, plus one
global sign for the total form.  The bracket convention is fixed so that
on a sphere factor {x, y} = -sigma z / R cyclically and on a plane factor
{u, v} = +sigma / rho; with this choice the flow of the momentum L of every
catalog system is exactly 2*pi-periodic and L, H Poisson-commute.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConstraintError, IntegrationError, ManifoldMismatchError

SPHERE = "sphere"
PLANE = "plane"

_BLOCK_DIM = {SPHERE: 3, PLANE: 2}
SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Ordered product of sphere/plane factors with symplectic weights."""

    factors: tuple[str, ...]
    weights: tuple[float, ...]
    global_sign: int = 1

    def __post_init__(self):
        if len(self.factors) != len(self.weights):
            raise ValueError("factor count and weight count must match")
        if any(w <= 0 for w in self.weights):
            raise ValueError("all symplectic weights must be strictly positive")
        if self.global_sign not in (-1, 1):
            raise ValueError("global_sign must be +1 or -1")
        for f in self.factors:
            if f not in _BLOCK_DIM:
                raise ValueError(f"unknown factor kind {f!r}")

    @property
    def dim(self) -> int:
        return sum(_BLOCK_DIM[f] for f in self.factors)

    @property
    def block_slices(self) -> tuple[slice, ...]:
        out, k = [], 0
        for f in self.factors:
            d = _BLOCK_DIM[f]
            out.append(slice(k, k + d))
            k += d
        return tuple(out)

    def random_point(self, rng: np.random.Generator, plane_scale: float = 1.0) -> "PhasePoint":
        coords = np.empty(self.dim)
        for f, sl in zip(self.factors, self.block_slices):
            if f == SPHERE:
                v = rng.normal(size=3)
                coords[sl] = v / np.linalg.norm(v)
            else:
                coords[sl] = rng.normal(size=2) * plane_scale
        return PhasePoint(self, coords)


@dataclass
class PhasePoint:
    """Point on a product manifold, stored as one flat coordinate vector."""

    manifold: ManifoldDescriptor
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).copy()
        if self.coords.shape != (self.manifold.dim,):
            raise ValueError("coordinate vector has wrong length")

    def block(self, i: int) -> np.ndarray:
        return self.coords[self.manifold.block_slices[i]]

    @property
    def blocks(self):
        return [self.block(i) for i in range(len(self.manifold.factors))]

    def validate(self, tol: float = SPHERE_TOL):
        for f, b in zip(self.manifold.factors, self.blocks):
            if f == SPHERE:
                err = abs(b @ b - 1.0)
                if err > tol:
                    raise ConstraintError(
                        f"sphere block off the unit sphere by {err:.2e} (tol {tol:.0e})")
        return self

    def renormalized(self) -> "PhasePoint":
        out = self.coords.copy()
        for f, sl in zip(self.manifold.factors, self.manifold.block_slices):
            if f == SPHERE:
                out[sl] /= np.linalg.norm(out[sl])
        return PhasePoint(self.manifold, out)

    def copy(self) -> "PhasePoint":
        return PhasePoint(self.manifold, self.coords)

    def __repr__(self):
        vals = ", ".join(f"{c:+.6f}" for c in self.coords)
        return f"PhasePoint({vals})"


@dataclass
class TangentVector:
    """Tangent vector at a base point, same block layout as the point."""

    base: PhasePoint
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).copy()

    def block(self, i: int) -> np.ndarray:
        return self.coords[self.base.manifold.block_slices[i]]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def validate(self, tol: float = SPHERE_TOL):
        m = self.base.manifold
        for f, sl in zip(m.factors, m.block_slices):
            if f == SPHERE:
                r = abs(self.coords[sl] @ self.base.coords[sl])
                if r > tol * max(1.0, np.linalg.norm(self.coords[sl])):
                    raise ConstraintError(f"sphere block not tangent (residual {r:.2e})")
        return self


# -- observables ------------------------------------------------------------

class Observable:
    """Scalar function on a manifold with gradient and Hessian access."""

    name = "f"

    def value(self, p: PhasePoint) -> float:
        raise NotImplementedError

    def gradient(self, p: PhasePoint) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, p: PhasePoint) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, p: PhasePoint) -> float:
        return self.value(p)


class ClosedFormObservable(Observable):
    def __init__(self, name, value_fn, gradient_fn, hessian_fn):
        self.name = name
        self._value = value_fn
        self._gradient = gradient_fn
        self._hessian = hessian_fn

    def value(self, p):
        return float(self._value(p.coords))

    def gradient(self, p):
        return np.asarray(self._gradient(p.coords), dtype=float)

    def hessian(self, p):
        return np.asarray(self._hessian(p.coords), dtype=float)


class FiniteDifferenceObservable(Observable):
    """Generic observable with 4th-order central-difference derivatives."""

    def __init__(self, func, name="f", step=1e-6):
        self.name = name
        self._func = func
        self.step = step

    def value(self, p):
        return float(self._func(p.coords))

    def _directional(self, x, i):
        h = self.step
        e = np.zeros_like(x)
        e[i] = 1.0
        f = self._func
        return (-f(x + 2 * h * e) + 8 * f(x + h * e)
                - 8 * f(x - h * e) + f(x - 2 * h * e)) / (12 * h)

    def gradient(self, p):
        x = p.coords
        return np.array([self._directional(x, i) for i in range(len(x))])

    def hessian(self, p):
        x = p.coords
        n = len(x)
        h = self.step ** 0.5 * 1e-2  # larger step: second differences lose half the digits
        H = np.zeros((n, n))
        f = self._func
        for i in range(n):
            for j in range(i, n):
                ei = np.zeros(n); ei[i] = h
                ej = np.zeros(n); ej[j] = h
                H[i, j] = H[j, i] = (
                    f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
                ) / (4 * h * h)
        return H


class LinearCombinationObservable(Observable):
    def __init__(self, a, f: Observable, b, g: Observable):
        self.a, self.b, self.f, self.g = a, b, f, g
        self.name = f"{a}*{f.name}+{b}*{g.name}"

    def value(self, p):
        return self.a * self.f.value(p) + self.b * self.g.value(p)

    def gradient(self, p):
        return self.a * self.f.gradient(p) + self.b * self.g.gradient(p)

    def hessian(self, p):
        return self.a * self.f.hessian(p) + self.b * self.g.hessian(p)


def _resolve(system, observable) -> Observable:
    if isinstance(observable, Observable):
        return observable
    if isinstance(observable, str):
        key = observable.upper()
        if key == "L":
            return system.L
        if key == "H":
            return system.H
    raise ValueError(f"cannot resolve observable {observable!r}")


def _check_point(system, p: PhasePoint):
    if p.manifold != system.manifold:
        raise ManifoldMismatchError("point lives on a different manifold")
    p.validate(1e-9)


# -- fields, brackets, flows -------------------------------------------------

def field_from_gradient(manifold: ManifoldDescriptor, coords: np.ndarray,
                        grad: np.ndarray) -> np.ndarray:
    """Hamiltonian field in ambient coordinates from an ambient gradient."""
    sigma = manifold.global_sign
    out = np.empty_like(grad)
    for f, w, sl in zip(manifold.factors, manifold.weights, manifold.block_slices):
        if f == SPHERE:
            n = coords[sl]
            out[sl] = -(sigma / w) * np.cross(n, grad[sl])
        else:
            gu, gv = grad[sl]
            out[sl] = (sigma / w) * np.array([-gv, gu])
    return out


def hamiltonian_vector_field(system, observable, p: PhasePoint) -> TangentVector:
    """Field X_f with omega(X_f, .) = -df, in the package bracket convention."""
    _check_point(system, p)
    obs = _resolve(system, observable)
    vec = field_from_gradient(system.manifold, p.coords, obs.gradient(p))
    return TangentVector(p, vec)


def poisson_bracket(system, f, g, p: PhasePoint) -> float:
    """{f, g}(p) summed over all factors."""
    _check_point(system, p)
    fo, go = _resolve(system, f), _resolve(system, g)
    gf, gg = fo.gradient(p), go.gradient(p)
    m = system.manifold
    sigma = m.global_sign
    total = 0.0
    for fac, w, sl in zip(m.factors, m.weights, m.block_slices):
        if fac == SPHERE:
            n = p.coords[sl]
            total += -(sigma / w) * float(n @ np.cross(gf[sl], gg[sl]))
        else:
            total += (sigma / w) * float(gf[sl][0] * gg[sl][1] - gf[sl][1] * gg[sl][0])
    return total


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_samples, dim)
    manifold: ManifoldDescriptor = field(repr=False, default=None)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.manifold, self.states[i])

    @property
    def final(self) -> PhasePoint:
        return self.point(len(self.times) - 1)


def _renormalize_states(manifold, states):
    for f, sl in zip(manifold.factors, manifold.block_slices):
        if f == SPHERE:
            norms = np.linalg.norm(states[:, sl], axis=1, keepdims=True)
            states[:, sl] /= norms
    return states


def flow(system, observable, p0: PhasePoint, duration: float, tol: float = 1e-10,
         n_samples: int = 33, chunk: float = 0.5) -> Trajectory:
    """Adaptive high-order flow of an observable with sphere renormalization.

    Integration runs in ambient coordinates with DOP853; sphere blocks are
    radially re-projected at every chunk boundary and at every sample, which
    keeps the constraint drift far below the integration tolerance.
    """
    _check_point(system, p0)
    obs = _resolve(system, observable)
    m = system.manifold

    def rhs(_t, y):
        return field_from_gradient(m, y, obs.gradient(PhasePoint(m, y)))

    t_samples = np.linspace(0.0, duration, n_samples)
    states = np.empty((n_samples, m.dim))
    states[0] = p0.coords
    y = p0.coords.copy()
    t = 0.0
    si = 1
    sgn = 1.0 if duration >= 0 else -1.0
    while sgn * (duration - t) > 1e-15:
        t_next = t + sgn * min(chunk, abs(duration - t))
        sol = solve_ivp(rhs, (t, t_next), y, method="DOP853",
                        rtol=tol, atol=tol * 1e-2, dense_output=True)
        if not sol.success:
            raise IntegrationError(f"flow failed at t={t:.4g}: {sol.message}")
        while si < n_samples and sgn * (t_samples[si] - t_next) <= 1e-15:
            states[si] = sol.sol(t_samples[si])
            si += 1
        y = PhasePoint(m, sol.sol(t_next)).renormalized().coords
        t = t_next
    if si < n_samples:  # duration == 0 edge case
        states[si:] = y
    states = _renormalize_states(m, states)
    return Trajectory(t_samples, states, m)
