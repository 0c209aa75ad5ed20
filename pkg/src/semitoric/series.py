"""Dense truncated multivariate power series.

The normal-form pipeline works with polynomials in four symplectic chart
variables (q1, q2, p1, p2) truncated at a fixed total degree, and with
two-variable series in (l, j) or (l, h) for the singular-value
correspondence.  Degrees stay small (<= 8), so a dense coefficient table
indexed by exponent multi-index is simpler and faster than sparse
bookkeeping.
"""
from __future__ import annotations

import itertools

import numpy as np


def _total_degree_mask(nvars: int, degree: int) -> np.ndarray:
    grids = np.indices((degree + 1,) * nvars)
    return grids.sum(axis=0) <= degree


class TruncatedSeries:
    """Polynomial in ``nvars`` variables truncated at total degree ``degree``.

    Coefficients live in a dense ndarray of shape ``(degree+1,)*nvars``;
    entry ``c[e]`` multiplies ``prod(x_i**e_i)``.  All ring operations
    truncate so that stored exponents never exceed the total degree.
    """

    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars: int, degree: int, coeffs: np.ndarray | None = None,
                 dtype=np.float64):
        self.nvars = int(nvars)
        self.degree = int(degree)
        shape = (self.degree + 1,) * self.nvars
        if coeffs is None:
            self.coeffs = np.zeros(shape, dtype=dtype)
        else:
            coeffs = np.asarray(coeffs)
            if coeffs.shape != shape:
                raise ValueError(f"coefficient table must have shape {shape}")
            self.coeffs = coeffs.copy()
            self._enforce_truncation()

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars, degree, dtype=np.float64):
        return cls(nvars, degree, dtype=dtype)

    @classmethod
    def constant(cls, value, nvars, degree):
        s = cls(nvars, degree, dtype=np.complex128 if np.iscomplexobj(value) else np.float64)
        s.coeffs[(0,) * nvars] = value
        return s

    @classmethod
    def variable(cls, index, nvars, degree, dtype=np.float64):
        s = cls(nvars, degree, dtype=dtype)
        e = [0] * nvars
        e[index] = 1
        s.coeffs[tuple(e)] = 1.0
        return s

    @classmethod
    def from_terms(cls, terms, nvars, degree, dtype=np.float64):
        """Build from an iterable of (exponent-tuple, coefficient) pairs."""
        s = cls(nvars, degree, dtype=dtype)
        for expo, c in terms:
            if sum(expo) <= degree:
                s.coeffs[tuple(expo)] += c
        return s

    # -- bookkeeping ---------------------------------------------------

    def _enforce_truncation(self):
        mask = _total_degree_mask(self.nvars, self.degree)
        self.coeffs[~mask] = 0.0

    def copy(self):
        return TruncatedSeries(self.nvars, self.degree, self.coeffs)

    def astype(self, dtype):
        out = TruncatedSeries(self.nvars, self.degree, dtype=dtype)
        out.coeffs[...] = self.coeffs.astype(dtype)
        return out

    def terms(self, tol=0.0):
        """Iterate (exponent tuple, coefficient) over non-negligible entries."""
        idx = np.argwhere(np.abs(self.coeffs) > tol)
        for e in idx:
            yield tuple(int(k) for k in e), self.coeffs[tuple(e)]

    def coefficient(self, expo):
        return self.coeffs[tuple(expo)]

    @property
    def const(self):
        return self.coeffs[(0,) * self.nvars]

    def norm(self):
        return float(np.abs(self.coeffs).max())

    def homogeneous_part(self, d):
        out = TruncatedSeries(self.nvars, self.degree, dtype=self.coeffs.dtype)
        grids = np.indices(self.coeffs.shape).sum(axis=0)
        sel = grids == d
        out.coeffs[sel] = self.coeffs[sel]
        return out

    def max_total_degree(self):
        grids = np.indices(self.coeffs.shape).sum(axis=0)
        nz = np.abs(self.coeffs) > 0
        return int(grids[nz].max()) if nz.any() else 0

    # -- ring operations -----------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.nvars != self.nvars or other.degree != self.degree:
                raise ValueError("series shape mismatch")
            return other
        return TruncatedSeries.constant(other, self.nvars, self.degree)

    def __add__(self, other):
        other = self._coerce(other)
        dtype = np.result_type(self.coeffs, other.coeffs)
        out = TruncatedSeries(self.nvars, self.degree, dtype=dtype)
        out.coeffs[...] = self.coeffs + other.coeffs
        return out

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        dtype = np.result_type(self.coeffs, other.coeffs)
        out = TruncatedSeries(self.nvars, self.degree, dtype=dtype)
        out.coeffs[...] = self.coeffs - other.coeffs
        return out

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        out = TruncatedSeries(self.nvars, self.degree, dtype=self.coeffs.dtype)
        out.coeffs[...] = -self.coeffs
        return out

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            dtype = np.result_type(self.coeffs, other)
            out = TruncatedSeries(self.nvars, self.degree, dtype=dtype)
            out.coeffs[...] = self.coeffs * other
            return out
        other = self._coerce(other)
        dtype = np.result_type(self.coeffs, other.coeffs)
        out = TruncatedSeries(self.nvars, self.degree, dtype=dtype)
        n = self.degree + 1
        # exact convolution: shift-add the sparse side over the dense side
        a, b = self.coeffs, other.coeffs
        if np.count_nonzero(a) > np.count_nonzero(b):
            a, b = b, a
        for e in np.argwhere(a != 0):
            c = a[tuple(e)]
            src = b[tuple(slice(0, n - k) for k in e)]
            dst = out.coeffs[tuple(slice(k, n) for k in e)]
            dst += c * src
        out._enforce_truncation()
        return out

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers not supported")
        result = TruncatedSeries.constant(1.0, self.nvars, self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus -------------------------------------------------------

    def diff(self, i):
        """Partial derivative with respect to variable ``i``."""
        out = TruncatedSeries(self.nvars, self.degree, dtype=self.coeffs.dtype)
        n = self.degree + 1
        sl_src = [slice(None)] * self.nvars
        sl_dst = [slice(None)] * self.nvars
        sl_src[i] = slice(1, n)
        sl_dst[i] = slice(0, n - 1)
        mult_shape = [1] * self.nvars
        mult_shape[i] = n - 1
        mult = np.arange(1, n, dtype=float).reshape(mult_shape)
        out.coeffs[tuple(sl_dst)] = self.coeffs[tuple(sl_src)] * mult
        return out

    def poisson(self, other, pairing):
        """Poisson bracket sum_{ab} P[a,b] d_a(self) d_b(other).

        ``pairing`` is the antisymmetric matrix of brackets of the
        coordinate functions themselves.
        """
        other = self._coerce(other)
        dself = [self.diff(i) for i in range(self.nvars)]
        dother = [other.diff(i) for i in range(self.nvars)]
        out = None
        for a in range(self.nvars):
            for b in range(self.nvars):
                c = pairing[a, b]
                if c == 0:
                    continue
                term = dself[a] * dother[b] * c
                out = term if out is None else out + term
        if out is None:
            out = TruncatedSeries(self.nvars, self.degree, dtype=self.coeffs.dtype)
        return out

    # -- substitution ----------------------------------------------------

    def substitute(self, values):
        """Substitute a series (or scalar) for every variable.

        ``values[i]`` replaces variable ``i``; all must share one target
        shape.  Powers of the substituted series are cached, so the cost is
        one series product per cached power plus one per stored monomial.
        """
        target = None
        for v in values:
            if isinstance(v, TruncatedSeries):
                target = v
                break
        if target is None:
            raise ValueError("at least one substitution value must be a series")
        nv, deg = target.nvars, target.degree
        vals = [v if isinstance(v, TruncatedSeries)
                else TruncatedSeries.constant(v, nv, deg) for v in values]
        dtype = np.result_type(self.coeffs, *(v.coeffs for v in vals))
        powers = []
        for v in vals:
            p = [TruncatedSeries.constant(1.0, nv, deg).astype(dtype)]
            for _ in range(self.degree):
                p.append(p[-1] * v)
            powers.append(p)
        out = TruncatedSeries(nv, deg, dtype=dtype)
        for expo, c in self.terms():
            term = TruncatedSeries.constant(c, nv, deg).astype(dtype)
            for i, k in enumerate(expo):
                if k:
                    term = term * powers[i][k]
            out = out + term
        return out

    def compose_linear(self, matrix):
        """Series of x -> f(M y): substitute x_i = sum_j M[i, j] y_j."""
        matrix = np.asarray(matrix)
        dtype = np.result_type(self.coeffs, matrix)
        vals = []
        for i in range(self.nvars):
            v = TruncatedSeries(self.nvars, self.degree, dtype=dtype)
            for j in range(self.nvars):
                e = [0] * self.nvars
                e[j] = 1
                v.coeffs[tuple(e)] = matrix[i, j]
            vals.append(v)
        return self.substitute(vals)

    # -- evaluation and export -------------------------------------------

    def __call__(self, *point):
        point = [np.asarray(p) for p in point]
        out = None
        for expo, c in self.terms():
            term = c * np.ones_like(point[0], dtype=np.result_type(self.coeffs, point[0]))
            for i, k in enumerate(expo):
                if k:
                    term = term * point[i] ** k
            out = term if out is None else out + term
        if out is None:
            return np.zeros_like(point[0], dtype=self.coeffs.dtype)
        return out

    def quadratic_form_matrix(self):
        """Symmetric matrix S with quadratic part = 1/2 x^T S x."""
        S = np.zeros((self.nvars, self.nvars), dtype=self.coeffs.dtype)
        for expo, c in self.terms():
            if sum(expo) != 2:
                continue
            nz = [i for i, k in enumerate(expo) if k]
            if len(nz) == 1:
                i = nz[0]
                S[i, i] += 2.0 * c
            else:
                i, j = nz
                S[i, j] += c
                S[j, i] += c
        return S

    @classmethod
    def from_quadratic_form(cls, S, degree, dtype=None):
        """Series 1/2 x^T S x of a symmetric matrix S."""
        S = np.asarray(S)
        n = S.shape[0]
        dtype = dtype or S.dtype
        out = cls(n, degree, dtype=dtype)
        for i in range(n):
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                out.coeffs[tuple(e)] += 0.5 * S[i, j]
        return out

    def to_coeff_list(self, tol=0.0):
        """Sorted (exponents, coefficient) list for JSON snapshots."""
        items = sorted(self.terms(tol))
        return [{"exponents": list(e), "coefficient": float(np.real(c))}
                for e, c in items]

    def __repr__(self):
        parts = []
        for expo, c in itertools.islice(self.terms(1e-14), 8):
            parts.append(f"{c:+.3g}*x^{expo}")
        more = "..." if sum(1 for _ in self.terms(1e-14)) > 8 else ""
        return f"TruncatedSeries({self.nvars} vars, deg<={self.degree}: {' '.join(parts)}{more})"


# Pairing matrices for the 4-variable chart algebras -----------------------

def canonical_pairing(n_pairs=2):
    """Brackets of (q1..qn, p1..pn) with {q_i, p_j} = delta_ij."""
    n = 2 * n_pairs
    P = np.zeros((n, n))
    for i in range(n_pairs):
        P[i, n_pairs + i] = 1.0
        P[n_pairs + i, i] = -1.0
    return P


def complex_focus_pairing():
    """Brackets of (zeta, zetabar, rho, rhobar) with {zeta, rhobar} = {zetabar, rho} = 2."""
    P = np.zeros((4, 4), dtype=np.complex128)
    P[0, 3] = 2.0
    P[3, 0] = -2.0
    P[1, 2] = 2.0
    P[2, 1] = -2.0
    return P


REAL_TO_COMPLEX = 0.5 * np.array(
    [[1, 1, 0, 0],
     [-1j, 1j, 0, 0],
     [0, 0, 1, 1],
     [0, 0, -1j, 1j]], dtype=np.complex128)
# columns of REAL_TO_COMPLEX express (q1,q2,p1,p2) in terms of
# (zeta, zetabar, rho, rhobar): q1 = (zeta+zetabar)/2, q2 = (zeta-zetabar)/(2i), ...

COMPLEX_TO_REAL = np.array(
    [[1, 1j, 0, 0],
     [1, -1j, 0, 0],
     [0, 0, 1, 1j],
     [0, 0, 1, -1j]], dtype=np.complex128)
# zeta = q1 + i q2, zetabar = q1 - i q2, rho = p1 + i p2, rhobar = p1 - i p2


def to_complex_chart(series: TruncatedSeries) -> TruncatedSeries:
    """Rewrite a (q1,q2,p1,p2)-series in (zeta, zetabar, rho, rhobar)."""
    return series.astype(np.complex128).compose_linear(REAL_TO_COMPLEX)


def to_real_chart(series: TruncatedSeries) -> TruncatedSeries:
    return series.compose_linear(COMPLEX_TO_REAL)
