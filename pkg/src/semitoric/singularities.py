"""Rank-0 singular points: search, linearized classification, scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import System, make_system
from .errors import RankError
from .phasespace import (PLANE, SPHERE, ManifoldDescriptor, PhasePoint,
                         field_from_gradient)

RANK_ZERO_TOL = 1e-8
CLASSIFY_TOL = 1e-7

ELLIPTIC_ELLIPTIC = "elliptic-elliptic"
FOCUS_FOCUS = "focus-focus"
DEGENERATE = "degenerate"

OMEGA4 = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
OMEGA4_INV = -OMEGA4

# fixed pseudo-random sequence of regularizing multiples c for H + c L
_C_SEQUENCE = tuple(np.random.default_rng(20240917).uniform(0.35, 1.9, size=12))


@dataclass
class SingularityRecord:
    point: PhasePoint
    kind: str
    critical_value: tuple[float, float]
    eigen_data: np.ndarray
    regularizer: float = field(default=float("nan"))

    def __repr__(self):
        lam, eta = self.critical_value
        return (f"SingularityRecord({self.kind} at F=({lam:+.6f}, {eta:+.6f}))")


# -- tangent frames and intrinsic Hessians -----------------------------------

def darboux_frame(manifold: ManifoldDescriptor, p: PhasePoint) -> np.ndarray:
    """Columns (Q1, Q2, P1, P2): a symplectic basis of the tangent space.

    Each factor contributes one conjugate pair scaled by its weight and the
    global sign, so the tangent symplectic form becomes the standard
    block matrix OMEGA4 in this basis.
    """
    sigma = manifold.global_sign
    qs, ps = [], []
    dim = manifold.dim
    for fac, w, sl in zip(manifold.factors, manifold.weights, manifold.block_slices):
        q = np.zeros(dim)
        pv = np.zeros(dim)
        if fac == SPHERE:
            n = p.coords[sl]
            axis = np.zeros(3)
            axis[int(np.argmin(np.abs(n)))] = 1.0
            t1 = axis - (axis @ n) * n
            t1 /= np.linalg.norm(t1)
            t2 = np.cross(n, t1)
            # omega(t1, t2) = -sigma*w; swap when that is negative
            if -sigma * w > 0:
                q[sl], pv[sl] = t1 / math.sqrt(w), t2 / math.sqrt(w)
            else:
                q[sl], pv[sl] = t2 / math.sqrt(w), t1 / math.sqrt(w)
        else:
            # omega(e_u, e_v) = sigma*w
            if sigma * w > 0:
                q[sl] = np.array([1.0, 0.0]) / math.sqrt(w)
                pv[sl] = np.array([0.0, 1.0]) / math.sqrt(w)
            else:
                q[sl] = np.array([0.0, 1.0]) / math.sqrt(w)
                pv[sl] = np.array([1.0, 0.0]) / math.sqrt(w)
        qs.append(q)
        ps.append(pv)
    return np.column_stack(qs + ps)


def intrinsic_hessian_form(system: System, obs, p: PhasePoint,
                           basis: np.ndarray) -> np.ndarray:
    """Hessian of obs restricted to the tangent space, in the given basis.

    Sphere factors pick up the curvature correction -(grad . n) <a, b>;
    it matters because rank-0 points are constrained critical points.
    """
    m = system.manifold
    grad = obs.gradient(p)
    hess = obs.hessian(p)
    S = basis.T @ hess @ basis
    for fac, sl in zip(m.factors, m.block_slices):
        if fac == SPHERE:
            lam = grad[sl] @ p.coords[sl]
            blk = basis[sl, :]
            S -= lam * (blk.T @ blk)
    return 0.5 * (S + S.T)


def linearization(system: System, p: PhasePoint, c: float) -> np.ndarray:
    """4x4 Hamiltonian matrix of H + c L at a rank-0 point."""
    basis = darboux_frame(system.manifold, p)
    S = (intrinsic_hessian_form(system, system.H, p, basis)
         + c * intrinsic_hessian_form(system, system.L, p, basis))
    return OMEGA4_INV @ S


# -- eigenvalue pattern matching ---------------------------------------------

def _pattern(eigs: np.ndarray, tol_rel: float):
    """Classify one eigenvalue quadruple; None means ambiguous for this c."""
    rho = float(np.abs(eigs).max())
    if rho == 0.0:
        return None
    re, im = eigs.real / rho, eigs.imag / rho
    if np.all(np.abs(re) > tol_rel) and np.all(np.abs(im) > tol_rel):
        return FOCUS_FOCUS
    if np.all(np.abs(re) <= tol_rel):
        freqs = np.sort(np.abs(im))
        # two conjugate pairs: the two largest (and two smallest) must pair up
        if abs(freqs[0] - freqs[1]) <= tol_rel or abs(freqs[2] - freqs[3]) <= tol_rel:
            b1, b2 = freqs[1], freqs[3]
            if min(b1, b2) <= tol_rel:
                return None  # zero frequency: degenerate or needs another c
            if abs(b1 - b2) <= tol_rel:
                return None  # resonant collision: retry with another c
            return ELLIPTIC_ELLIPTIC
    return None


def eigenvalue_pairing_residual(eigs: np.ndarray) -> float:
    """Distance of the spectrum from closure under negation and conjugation."""
    res = 0.0
    for lam in eigs:
        res = max(res, np.abs(eigs + lam).min(), np.abs(eigs - np.conj(lam)).min())
    return float(res)


def rank_zero_residual(system: System, p: PhasePoint) -> float:
    gl = field_from_gradient(system.manifold, p.coords, system.L.gradient(p))
    gh = field_from_gradient(system.manifold, p.coords, system.H.gradient(p))
    return float(max(np.abs(gl).max(), np.abs(gh).max()))


def classify(system: System, p: PhasePoint, tol: float = CLASSIFY_TOL,
             rank_tol: float = RANK_ZERO_TOL) -> SingularityRecord:
    """Classify a rank-0 point through the linearized flow of H + c L.

    The regularizing multiple c is drawn from a fixed sequence; a verdict is
    accepted as soon as one c yields a clean eigenvalue pattern, and the point
    is declared degenerate when every c leaves collisions within tolerance.
    """
    p = p.renormalized()
    res = rank_zero_residual(system, p)
    if res > rank_tol:
        raise RankError(f"point is not rank-0 (field residual {res:.2e})")
    lam_eta = system.evaluate(p)
    eig_last = None
    c_last = _C_SEQUENCE[0]
    for c in _C_SEQUENCE[:6]:
        A = linearization(system, p, c)
        eigs = np.linalg.eigvals(A)
        eig_last, c_last = eigs, c
        kind = _pattern(eigs, tol)
        if kind is not None:
            return SingularityRecord(p, kind, lam_eta, eigs, c)
    return SingularityRecord(p, DEGENERATE, lam_eta, eig_last, c_last)


# -- rank-0 search ------------------------------------------------------------

def _pole_lattice(manifold: ManifoldDescriptor):
    """Seed points: all combinations of sphere poles and plane origins."""
    choices = []
    for fac in manifold.factors:
        if fac == SPHERE:
            choices.append([np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])])
        else:
            choices.append([np.array([0.0, 0.0])])
    seeds = [[]]
    for ch in choices:
        seeds = [s + [b] for s in seeds for b in ch]
    return [PhasePoint(manifold, np.concatenate(s)) for s in seeds]


def _retract(manifold: ManifoldDescriptor, coords: np.ndarray) -> np.ndarray:
    out = coords.copy()
    for fac, sl in zip(manifold.factors, manifold.block_slices):
        if fac == SPHERE:
            out[sl] /= np.linalg.norm(out[sl])
    return out


def _tangent_basis(manifold: ManifoldDescriptor, coords: np.ndarray) -> np.ndarray:
    cols = []
    dim = manifold.dim
    for fac, sl in zip(manifold.factors, manifold.block_slices):
        if fac == SPHERE:
            n = coords[sl]
            axis = np.zeros(3)
            axis[int(np.argmin(np.abs(n)))] = 1.0
            t1 = axis - (axis @ n) * n
            t1 /= np.linalg.norm(t1)
            t2 = np.cross(n, t1)
            for t in (t1, t2):
                v = np.zeros(dim)
                v[sl] = t
                cols.append(v)
        else:
            for k in range(2):
                v = np.zeros(dim)
                v[sl.start + k] = 1.0
                cols.append(v)
    return np.column_stack(cols)


def _refine_rank_zero(system: System, p0: PhasePoint, max_iter=60):
    """Gauss-Newton on the combined field residual, in tangent charts."""
    m = system.manifold

    def residual(coords):
        pt = PhasePoint(m, coords)
        gl = field_from_gradient(m, coords, system.L.gradient(pt))
        gh = field_from_gradient(m, coords, system.H.gradient(pt))
        return np.concatenate([gl, gh])

    coords = _retract(m, p0.coords.copy())
    fd = 1e-7
    for _ in range(max_iter):
        r = residual(coords)
        if np.abs(r).max() < 1e-13:
            break
        T = _tangent_basis(m, coords)
        J = np.empty((len(r), T.shape[1]))
        for k in range(T.shape[1]):
            rp = residual(_retract(m, coords + fd * T[:, k]))
            rm = residual(_retract(m, coords - fd * T[:, k]))
            J[:, k] = (rp - rm) / (2 * fd)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        scale = 1.0
        base = np.abs(r).max()
        for _ in range(20):
            cand = _retract(m, coords + scale * (T @ step))
            if np.abs(residual(cand)).max() < base:
                coords = cand
                break
            scale *= 0.5
        else:
            break
    if np.abs(residual(coords)).max() > 1e-9:
        return None
    return PhasePoint(m, coords)


def find_rank_zero_points(system: System, seed: int = 0, n_random: int = 24,
                          merge_tol: float = 1e-8) -> list[PhasePoint]:
    """All points where both Hamiltonian fields vanish.

    Newton iterations are seeded from the pole lattice plus a random
    multistart; converged points are merged within ``merge_tol``.
    Non-convergent seeds are skipped.
    """
    m = system.manifold
    rng = np.random.default_rng(seed)
    seeds = _pole_lattice(m) + [m.random_point(rng) for _ in range(n_random)]
    found: list[PhasePoint] = []
    for s in seeds:
        pt = _refine_rank_zero(system, s)
        if pt is None:
            continue
        if all(np.abs(pt.coords - q.coords).max() > merge_tol for q in found):
            found.append(pt)
    found.sort(key=lambda q: tuple(np.round(q.coords, 6)))
    return found


def count_focus_focus(system: System, seed: int = 0, tol: float = CLASSIFY_TOL,
                      pole_only: bool = False):
    """n_FF together with the classified records of all rank-0 points."""
    if pole_only:
        points = [q for q in ( _refine_rank_zero(system, s) for s in _pole_lattice(system.manifold)) if q is not None]
    else:
        points = find_rank_zero_points(system, seed=seed)
    records = [classify(system, p, tol=tol) for p in points]
    n_ff = sum(1 for r in records if r.kind == FOCUS_FOCUS)
    return n_ff, records


# -- parameter scans -----------------------------------------------------------

def _n_ff_at(family: str, fixed: dict, axis: str, value: float) -> int:
    system = make_system(family, **{**fixed, axis: value})
    n_ff, _ = count_focus_focus(system, pole_only=True)
    return n_ff


def _signature_at(family: str, fixed: dict, axis: str, value: float) -> tuple:
    """Kinds of all rank-0 points, ordered by point coordinates.

    Signatures see flips that leave the total count unchanged (two points
    exchanging type across the same parameter value).
    """
    system = make_system(family, **{**fixed, axis: value})
    _n, records = count_focus_focus(system, pole_only=True)
    records.sort(key=lambda r: tuple(np.round(r.point.coords, 6)))
    return tuple(r.kind for r in records)


def transition_scan(family: str, fixed: dict, axis: str, lo: float, hi: float,
                    resolution: int = 64, refine_tol: float = 1e-8) -> list[float]:
    """Locate classification flips along one parameter axis.

    Grid classification followed by bisection of every adjacent signature
    change down to ``refine_tol``; returns the sorted flip locations (empty
    when none).
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    values = np.linspace(lo, hi, resolution)
    sigs = [_signature_at(family, fixed, axis, v) for v in values]
    transitions = []
    for a, b, sa, sb in zip(values[:-1], values[1:], sigs[:-1], sigs[1:]):
        if sa == sb:
            continue
        left, right = a, b
        while right - left > refine_tol:
            mid = 0.5 * (left + right)
            if _signature_at(family, fixed, axis, mid) == sa:
                left = mid
            else:
                right = mid
        transitions.append(0.5 * (left + right))
    return transitions


@dataclass
class RegionMap:
    """Per-node focus-focus counts over the (s1, s2) unit square."""

    s1: np.ndarray
    s2: np.ndarray
    counts: np.ndarray  # shape (len(s2), len(s1))
    boundary: list[tuple[float, float]]

    def to_csv(self) -> str:
        lines = ["s1,s2,n_ff"]
        for j, t2 in enumerate(self.s2):
            for i, t1 in enumerate(self.s1):
                lines.append(f"{t1:.10g},{t2:.10g},{int(self.counts[j, i])}")
        return "\n".join(lines) + "\n"


def _region_row(args):
    R1, R2, s2, s1_values = args
    return [_n_ff_at("twoff", {"R1": R1, "R2": R2, "s2": s2}, "s1", v)
            for v in s1_values]


def region_map(R1: float, R2: float, resolution: int = 64,
               threads: int = 1) -> RegionMap:
    """Map n_FF over the coupling square, with one bisection refinement
    of every edge whose endpoints disagree."""
    if resolution < 32:
        raise ValueError("grid must be at least 32x32")
    s1 = np.linspace(0.0, 1.0, resolution)
    s2 = np.linspace(0.0, 1.0, resolution)
    jobs = [(R1, R2, t2, s1) for t2 in s2]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_region_row, jobs))
    else:
        rows = [_region_row(j) for j in jobs]
    counts = np.array(rows, dtype=int)

    boundary: list[tuple[float, float]] = []
    fixed_R = {"R1": R1, "R2": R2}
    for j, t2 in enumerate(s2):
        for i in range(resolution - 1):
            if counts[j, i] != counts[j, i + 1]:
                mid = 0.5 * (s1[i] + s1[i + 1])  # one bisection step
                a, b = (s1[i], mid) if _n_ff_at("twoff", {**fixed_R, "s2": t2}, "s1", mid) != counts[j, i] else (mid, s1[i + 1])
                boundary.append((0.5 * (a + b), t2))
    for i, t1 in enumerate(s1):
        for j in range(resolution - 1):
            if counts[j, i] != counts[j + 1, i]:
                mid = 0.5 * (s2[j] + s2[j + 1])
                a, b = (s2[j], mid) if _n_ff_at("twoff", {**fixed_R, "s1": t1}, "s2", mid) != counts[j, i] else (mid, s2[j + 1])
                boundary.append((t1, 0.5 * (a + b)))
    return RegionMap(s1, s2, counts, boundary)
