"""Birkhoff normal form at focus-focus points.

Pipeline: expand (L, H) in an exactly symplectic chart around the singular
point, normalize the quadratic parts to (J1, J2) = (q1 p2 - q2 p1,
q1 p1 + q2 p2) by a linear symplectic frame, then remove all non-(J1, J2)
terms degree by degree with Lie transforms.  The result is the singular-value
correspondence h(l, j) and its inverse j = rho2(l, h).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .catalog import System
from .errors import DegeneracyError, RankError, SpectrumTypeError
from .phasespace import PLANE, SPHERE, PhasePoint
from .series import (TruncatedSeries, canonical_pairing, complex_focus_pairing,
                     to_complex_chart, to_real_chart)
from .singularities import OMEGA4, rank_zero_residual

S_J1 = np.zeros((4, 4))
S_J1[0, 3] = S_J1[3, 0] = 1.0
S_J1[1, 2] = S_J1[2, 1] = -1.0

S_J2 = np.zeros((4, 4))
S_J2[0, 2] = S_J2[2, 0] = 1.0
S_J2[1, 3] = S_J2[3, 1] = 1.0

_C_SEQUENCE = tuple(np.random.default_rng(77130312).uniform(0.3, 1.7, size=10))


# -- symplectic charts ---------------------------------------------------------

def _sqrt_series(c0: float, lin: TruncatedSeries):
    """Series of sqrt(c0 + lin) with lin of positive valuation."""
    nv, deg = lin.nvars, lin.degree
    out = TruncatedSeries.constant(1.0, nv, deg)
    x = lin * (1.0 / c0)
    term = TruncatedSeries.constant(1.0, nv, deg)
    coef = 1.0
    for k in range(1, deg + 1):
        coef *= (0.5 - (k - 1)) / k
        term = term * x
        out = out + term * coef
    return out * math.sqrt(c0)


def sphere_chart_series(R: float, sigma: int, pole: int, rotation: np.ndarray | None,
                        q_index: int, p_index: int, nvars: int, degree: int):
    """Ambient (x, y, z) of a sphere factor as series in one chart pair.

    The chart is exactly symplectic for the factor form -sigma*R*(area form):
    near the pole +-1, with rho^2 = xi^2 + eta^2,

        z = pole * (1 - rho^2 / (2R)),   (x, y) = s(rho^2) * (xi, +-sigma eta),

    where s = sqrt(4R - rho^2) / (2R).  An optional SO(3) rotation maps the
    chart's pole to an arbitrary base point.
    """
    xi = TruncatedSeries.variable(q_index, nvars, degree)
    eta = TruncatedSeries.variable(p_index, nvars, degree)
    rho2 = xi * xi + eta * eta
    s = _sqrt_series(4.0 * R, -rho2) * (1.0 / (2.0 * R))
    x = xi * s
    if pole > 0:
        y = eta * s * (-sigma)
        z = TruncatedSeries.constant(1.0, nvars, degree) - rho2 * (1.0 / (2.0 * R))
    else:
        y = eta * s * (+sigma)
        z = TruncatedSeries.constant(-1.0, nvars, degree) + rho2 * (1.0 / (2.0 * R))
    if rotation is not None:
        xr = x * rotation[0, 0] + y * rotation[0, 1] + z * rotation[0, 2]
        yr = x * rotation[1, 0] + y * rotation[1, 1] + z * rotation[1, 2]
        zr = x * rotation[2, 0] + y * rotation[2, 1] + z * rotation[2, 2]
        x, y, z = xr, yr, zr
    return [x, y, z]


def plane_chart_series(rho: float, sigma: int, center: np.ndarray,
                       q_index: int, p_index: int, nvars: int, degree: int):
    """Ambient (u, v) of a plane factor as series in one chart pair."""
    xi = TruncatedSeries.variable(q_index, nvars, degree)
    eta = TruncatedSeries.variable(p_index, nvars, degree)
    w = sigma * rho
    if w > 0:
        u = xi * (1.0 / math.sqrt(w)) + center[0]
        v = eta * (1.0 / math.sqrt(w)) + center[1]
    else:
        u = eta * (1.0 / math.sqrt(-w)) + center[0]
        v = xi * (1.0 / math.sqrt(-w)) + center[1]
    return [u, v]


def _rotation_to_north(n: np.ndarray) -> np.ndarray:
    """SO(3) matrix M with M @ north = n (chart pole goes to the base point)."""
    north = np.array([0.0, 0.0, 1.0])
    v = np.cross(north, n)
    c = float(north @ n)
    if np.linalg.norm(v) < 1e-14:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1.0 + c)


@dataclass
class ChartInfo:
    """Bookkeeping of the symplectic chart used for a Taylor expansion."""

    point: PhasePoint
    critical_value: tuple[float, float]
    degree: int


def taylor_expand_at_point(system: System, p: PhasePoint, N: int = 6):
    """(L, H) expanded to total degree N in a Darboux chart at a rank-0 point.

    Constant terms are removed; a non-vanishing linear part means the point
    is not rank-0 and raises.  Returns (L_series, H_series, ChartInfo).
    """
    if N < 2:
        raise ValueError("need N >= 2")
    p = p.renormalized()
    if rank_zero_residual(system, p) > 1e-7:
        raise RankError("Taylor expansion requested at a point that is not rank-0")
    m = system.manifold
    if len(m.factors) != 2:
        raise ValueError("expansion supports two-factor products only")
    nvars = 4
    ambient = []
    for k, (fac, w, sl) in enumerate(zip(m.factors, m.weights, m.block_slices)):
        q_index, p_index = k, k + 2  # ordering (q1, q2, p1, p2)
        if fac == SPHERE:
            n = p.coords[sl]
            if abs(n[2] - 1.0) < 1e-12:
                blocks = sphere_chart_series(w, m.global_sign, +1, None,
                                             q_index, p_index, nvars, N)
            elif abs(n[2] + 1.0) < 1e-12:
                blocks = sphere_chart_series(w, m.global_sign, -1, None,
                                             q_index, p_index, nvars, N)
            else:
                rot = _rotation_to_north(n)
                blocks = sphere_chart_series(w, m.global_sign, +1, rot,
                                             q_index, p_index, nvars, N)
        else:
            blocks = plane_chart_series(w, m.global_sign, p.coords[sl],
                                        q_index, p_index, nvars, N)
        ambient.extend(blocks)
    L_expr, H_expr = system.expressions(ambient)
    lam, eta = system.evaluate(p)
    L_series = L_expr - lam
    H_series = H_expr - eta
    lin = max(L_series.homogeneous_part(1).norm(), H_series.homogeneous_part(1).norm())
    if lin > 1e-10:
        raise RankError(f"linear chart terms do not vanish (max {lin:.2e})")
    for s in (L_series, H_series):
        s.coeffs[(0,) * nvars] = 0.0
        g1 = s.homogeneous_part(1)
        s.coeffs[...] -= g1.coeffs
    return L_series, H_series, ChartInfo(p, (lam, eta), N)


# -- linear normalization -------------------------------------------------------

@dataclass
class FocusFocusFrame:
    """Linear symplectic frame sending (L2, H2) to (J1, alpha J1 + beta J2)."""

    matrix: np.ndarray
    alpha: float
    beta: float
    symplectic_residual: float
    quadratic_residual: float
    regularizer: float

    def validate(self):
        if self.symplectic_residual > 1e-10:
            raise DegeneracyError(
                f"frame symplecticity residual {self.symplectic_residual:.2e}")
        return self


def _omega_pair(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(a @ (OMEGA4 @ b))


def _null_basis(M: np.ndarray, k: int) -> np.ndarray:
    _u, s, vh = np.linalg.svd(M)
    return vh.conj().T[:, -k:]


def linear_focus_focus_normalize(L2, H2) -> FocusFocusFrame:
    """Symplectic 4x4 frame normalizing a focus-focus quadratic pair.

    Accepts quadratic-part series or symmetric matrices.  L2 must generate a
    2 pi periodic circle action (eigenvalues +-i); the frame maps it exactly
    to J1, and H2 to alpha J1 + beta J2 with beta > 0.
    """
    SL = L2.quadratic_form_matrix() if isinstance(L2, TruncatedSeries) else np.asarray(L2, float)
    SH = H2.quadratic_form_matrix() if isinstance(H2, TruncatedSeries) else np.asarray(H2, float)
    OmInv = -OMEGA4
    BL = OmInv @ SL
    eig_L = np.linalg.eigvals(BL)
    if np.abs(np.sort(eig_L.imag) - np.array([-1, -1, 1, 1])).max() > 1e-8 \
            or np.abs(eig_L.real).max() > 1e-8:
        raise SpectrumTypeError("L2 does not generate a unit-frequency circle action")
    E = _null_basis(BL - 1j * np.eye(4), 2)  # eigenspace of B_L for +i
    last_exc = None
    for c in _C_SEQUENCE:
        B = OmInv @ (SH + c * SL)
        M2 = np.linalg.pinv(E) @ B @ E
        mu, vecs = np.linalg.eig(M2)
        split = abs(mu[0].real - mu[1].real)
        if split < 1e-9 * max(1.0, np.abs(mu).max()):
            last_exc = SpectrumTypeError(
                "quadratic pair has elliptic or degenerate spectrum "
                f"(real split {split:.2e} at c={c:.3f})")
            continue
        order = np.argsort(mu.real)
        w1 = E @ vecs[:, order[0]]   # eigenvalue i*alpha - beta
        w2 = E @ vecs[:, order[1]]   # eigenvalue i*alpha + beta, beta > 0
        om = _omega_pair(w1, np.conj(w2))
        if abs(om) < 1e-12:
            last_exc = DegeneracyError("degenerate symplectic pairing in frame build")
            continue
        w2 = w2 * np.conj(2.0 / om)
        M = np.column_stack([w1.real, w1.imag, w2.real, w2.imag])
        sy_res = float(np.abs(M.T @ OMEGA4 @ M - OMEGA4).max())
        SHp = M.T @ SH @ M
        alpha = 0.5 * (SHp[0, 3] - SHp[1, 2])
        beta = 0.5 * (SHp[0, 2] + SHp[1, 3])
        q_res = float(max(np.abs(SHp - alpha * S_J1 - beta * S_J2).max(),
                          np.abs(M.T @ SL @ M - S_J1).max()))
        frame = FocusFocusFrame(M, float(alpha), float(beta), sy_res, q_res, c)
        if sy_res < 1e-10 and q_res < 1e-9 and abs(beta) > 1e-9:
            return frame
        last_exc = DegeneracyError(
            f"frame residuals too large (symplectic {sy_res:.2e}, quadratic {q_res:.2e})")
    raise last_exc


# -- Lie-series reduction --------------------------------------------------------

def lie_transform(series: TruncatedSeries, generator: TruncatedSeries,
                  pairing) -> TruncatedSeries:
    """exp(ad_G) applied to a series: f + {G, f} + {G, {G, f}}/2! + ...

    Terminates because the generator has valuation >= 3, so each bracket
    raises the degree; truncation caps the sum.
    """
    out = series
    term = series
    k = 1
    while True:
        term = generator.poisson(term, pairing)
        if term.norm() == 0.0:
            break
        out = out + term * (1.0 / math.factorial(k))
        k += 1
        if k > series.degree + 2:
            break
    return out


def _monomial_eigs(nvars_shape, alpha, beta):
    """ad_{alpha J1 + beta J2} eigenvalue per complex monomial.

    In (zeta, zetabar, rho, rhobar) a monomial with exponents (k1, k2, m1, m2)
    has eigenvalue -i alpha (k1 - k2 + m1 - m2) + beta (m1 + m2 - k1 - k2).
    """
    idx = np.indices(nvars_shape)
    k1, k2, m1, m2 = idx
    A = k1 - k2 + m1 - m2
    Bd = m1 + m2 - k1 - k2
    return -1j * alpha * A - beta * Bd * (-1.0), A, Bd


@dataclass
class EliassonMap:
    """Correspondence h = h(l, j) and its inverse j = rho2(l, h).

    Both are truncated series around the critical value (degree N/2 in the
    pair of variables); the orientation flag certifies d(rho2)/dh > 0.
    """

    h_series: TruncatedSeries      # variables (l, j)
    rho2_series: TruncatedSeries   # variables (l, h)
    alpha: float
    beta: float
    off_normal_residual: float
    round_trip_residual: float

    @property
    def orientation(self) -> int:
        return 1 if self.rho2_series.coefficient((0, 1)) > 0 else -1

    def j_of(self, dl, dh):
        return self.rho2_series(np.asarray(dl, float), np.asarray(dh, float))

    def h_of(self, dl, dj):
        return self.h_series(np.asarray(dl, float), np.asarray(dj, float))

    def to_json(self) -> str:
        doc = {
            "schema": "semitoric-eliasson/1",
            "alpha": self.alpha,
            "beta": self.beta,
            "h_series": self.h_series.to_coeff_list(1e-14),
            "rho2_series": self.rho2_series.to_coeff_list(1e-14),
            "off_normal_residual": self.off_normal_residual,
            "round_trip_residual": self.round_trip_residual,
        }
        return json.dumps(doc, indent=2)


def _invert_in_j(h_series: TruncatedSeries) -> TruncatedSeries:
    """Series reversion: solve h = h_series(l, j) for j = rho2(l, h)."""
    deg = h_series.degree
    alpha = h_series.coefficient((1, 0))
    beta = h_series.coefficient((0, 1))
    l_var = TruncatedSeries.variable(0, 2, deg)
    h_var = TruncatedSeries.variable(1, 2, deg)
    j = (h_var - l_var * alpha) * (1.0 / beta)
    for _ in range(deg + 1):
        rest = h_series.substitute([l_var, j]) - l_var * alpha - j * beta
        j = (h_var - l_var * alpha - rest) * (1.0 / beta)
    return j


def birkhoff_reduce(L_series: TruncatedSeries, H_series: TruncatedSeries,
                    frame: FocusFocusFrame, N: int | None = None) -> EliassonMap:
    """Iterative Lie-series normalization of H at a focus-focus point.

    Degree by degree (3..N) the homological equation removes every term of
    H that is not a polynomial in (J1, J2); the focus-focus spectrum keeps
    all divisors away from zero.  The normalized series is rewritten in
    (l, j) and inverted in j.
    """
    frame.validate()
    N = N or H_series.degree
    pairing_c = complex_focus_pairing()
    K = to_complex_chart(H_series.compose_linear(frame.matrix))
    Lc = to_complex_chart(L_series.compose_linear(frame.matrix))
    # L must be exactly J1 in the frame: J1 = (i/2) zeta rhobar - (i/2) zetabar rho
    J1c = TruncatedSeries(4, N, dtype=np.complex128)
    J1c.coeffs[1, 0, 0, 1] = 0.5j
    J1c.coeffs[0, 1, 1, 0] = -0.5j
    l_residual = (Lc - J1c).norm()
    if l_residual > 1e-9:
        raise DegeneracyError(f"L does not reduce to J1 in the frame ({l_residual:.2e})")

    alpha, beta = frame.alpha, frame.beta
    shape = K.coeffs.shape
    eig, A_idx, B_idx = _monomial_eigs(shape, alpha, beta)
    kernel = (A_idx == 0) & (B_idx == 0)
    totdeg = np.indices(shape).sum(axis=0)

    for d in range(3, N + 1):
        sel = (totdeg == d) & ~kernel
        bad = sel & (np.abs(eig) < 1e-12)
        if np.any(np.abs(K.coeffs[bad]) > 1e-12):
            raise DegeneracyError("small divisor below 1e-12 in homological solve")
        G = TruncatedSeries(4, N, dtype=np.complex128)
        solv = sel & (np.abs(eig) >= 1e-12)
        G.coeffs[solv] = K.coeffs[solv] / eig[solv]
        if G.norm() == 0.0:
            continue
        K = lie_transform(K, G, pairing_c)

    off_normal = float(np.abs(K.coeffs[~kernel]).max())

    # kernel monomials (zeta rhobar)^k1 (zetabar rho)^k2 = (j - i l)^k1 (j + i l)^k2
    deg2 = N // 2
    lv = TruncatedSeries.variable(0, 2, deg2).astype(np.complex128)
    jv = TruncatedSeries.variable(1, 2, deg2).astype(np.complex128)
    u = jv - lv * 1j
    ubar = jv + lv * 1j
    h_c = TruncatedSeries(2, deg2, dtype=np.complex128)
    for (k1, k2, m1, m2), cval in K.terms():
        if not (k1 == m2 and k2 == m1):
            continue
        h_c = h_c + (u ** k1) * (ubar ** k2) * cval
    imag_res = float(np.abs(h_c.coeffs.imag).max())
    if imag_res > 1e-10:
        raise DegeneracyError(f"imaginary residual {imag_res:.2e} mapping back to (l, j)")
    h_series = TruncatedSeries(2, deg2)
    h_series.coeffs[...] = h_c.coeffs.real
    h_series.coeffs[0, 0] = 0.0

    rho2 = _invert_in_j(h_series)
    lv2 = TruncatedSeries.variable(0, 2, deg2)
    hv2 = TruncatedSeries.variable(1, 2, deg2)
    round_trip = (h_series.substitute([lv2, rho2]) - hv2).norm()
    emap = EliassonMap(h_series, rho2, alpha, beta, off_normal, round_trip)
    if emap.orientation < 0:
        raise DegeneracyError("orientation convention violated (d rho2/dh <= 0)")
    return emap


def focus_focus_normal_form(system: System, record, N: int = 6):
    """Convenience wrapper: chart + frame + EliassonMap at a FF record."""
    Lser, Hser, chart = taylor_expand_at_point(system, record.point, N)
    frame = linear_focus_focus_normalize(Lser.homogeneous_part(2),
                                         Hser.homogeneous_part(2))
    emap = birkhoff_reduce(Lser, Hser, frame, N)
    return Lser, Hser, chart, frame, emap
