"""Scalar backends, tolerance policy, and dense linear-algebra kernels.

Matrices are plain ``numpy.ndarray`` objects in one of two backends:

* floating: dtype ``complex128``
* exact: dtype ``object`` with :class:`GaussianRational` entries
  (complex numbers whose real and imaginary parts are ``fractions.Fraction``)

Floating rank decisions use an SVD with the cutoff
``sigma > max(rows, cols) * machine_eps * sigma_max``; exact rank decisions
use Gaussian elimination over the rationals and ignore the tolerance policy.
Eigenvalue computation is floating-only and restricted to Hermitian input
(a cyclic Jacobi sweep); exact inputs are converted first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "GaussianRational",
    "TolerancePolicy",
    "DEFAULT_TOL",
    "SingularMatrixError",
    "NonHermitianError",
    "exact_matrix",
    "exact_zeros",
    "exact_eye",
    "is_exact",
    "to_float",
    "conj_t",
    "max_abs",
    "rank_and_kernel",
    "matrix_rank",
    "kernel_basis",
    "range_basis",
    "subspace_contains",
    "containment_residual",
    "hermitian_eigen",
    "unitary_multiple_test",
    "exact_rref",
    "exact_solve",
    "inverse",
    "is_nonsingular",
    "pivot_columns",
    "orthonormal_columns",
    "complete_to_basis",
]

_EPS = float(np.finfo(np.float64).eps)


class SingularMatrixError(ValueError):
    """Raised when a matrix required to be nonsingular is not."""


class NonHermitianError(ValueError):
    """Raised when an eigensolver input is not Hermitian within tolerance."""


# ---------------------------------------------------------------------------
# exact scalar
# ---------------------------------------------------------------------------

class GaussianRational:
    """Complex number with rational real and imaginary parts.

    Immutable; supports +, -, *, / (exact), conjugate(), and conversion to
    ``complex``.  Accepts ints, ``Fraction``, and "p/q" strings for either
    component.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def from_value(cls, value) -> "GaussianRational":
        """Coerce ints, Fractions, strings, floats, complex, or pairs."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction, str)):
            return cls(value)
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(Fraction(value[0]), Fraction(value[1]))
        raise TypeError(f"cannot build GaussianRational from {value!r}")

    def _coerce(self, other):
        try:
            return GaussianRational.from_value(other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.sqrt(float(self.abs2()))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({str(self.re)!r})"
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


_GR_ZERO = GaussianRational(0)
_GR_ONE = GaussianRational(1)


def _bit_size(g: GaussianRational) -> int:
    # cheap complexity measure for pivot selection
    return (
        g.re.numerator.bit_length()
        + g.re.denominator.bit_length()
        + g.im.numerator.bit_length()
        + g.im.denominator.bit_length()
    )


# ---------------------------------------------------------------------------
# matrix construction and backend helpers
# ---------------------------------------------------------------------------

def exact_matrix(data) -> np.ndarray:
    """Build an exact (object-dtype) matrix from nested values.

    Accepts anything :meth:`GaussianRational.from_value` handles per entry,
    including another ndarray (floats are converted exactly, binary value).
    """
    arr = np.asarray(data, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = GaussianRational.from_value(arr[idx])
    return out


def exact_zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out[...] = _GR_ZERO
    return out


def exact_eye(n: int) -> np.ndarray:
    out = exact_zeros(n, n)
    for k in range(n):
        out[k, k] = _GR_ONE
    return out


def is_exact(m: np.ndarray) -> bool:
    return m.dtype == object


def to_float(m: np.ndarray) -> np.ndarray:
    """Convert either backend to complex128 (no-op copy for floating)."""
    if is_exact(m):
        out = np.empty(m.shape, dtype=complex)
        for idx in np.ndindex(m.shape):
            out[idx] = complex(m[idx])
        return out
    return np.asarray(m, dtype=complex)


def zeros_like_backend(rows: int, cols: int, exact: bool) -> np.ndarray:
    return exact_zeros(rows, cols) if exact else np.zeros((rows, cols), dtype=complex)


def eye_like_backend(n: int, exact: bool) -> np.ndarray:
    return exact_eye(n) if exact else np.eye(n, dtype=complex)


def conj_t(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose in either backend."""
    return np.conjugate(m).T


def max_abs(m: np.ndarray) -> float:
    """Largest entry modulus (float; exact entries measured in floats)."""
    if m.size == 0:
        return 0.0
    if is_exact(m):
        return max(abs(v) for v in m.flat)
    return float(np.max(np.abs(m)))


def is_zero_matrix(m: np.ndarray, tol: "TolerancePolicy | None" = None) -> bool:
    if is_exact(m):
        return all(not v for v in m.flat)
    pol = DEFAULT_TOL if tol is None else tol
    return max_abs(m) <= pol.equality_atol


# ---------------------------------------------------------------------------
# tolerance policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TolerancePolicy:
    """Floating-point decision thresholds.

    ``rank_rtol``: relative singular-value cutoff; ``None`` means the
    standard ``max(rows, cols) * machine_eps`` rule.
    ``equality_atol``: absolute tolerance for residual/zero tests.
    ``nonsingular_margin``: minimum ``sigma_min / sigma_max`` ratio for a
    square matrix to count as safely nonsingular.

    The exact backend ignores this policy entirely.
    """

    rank_rtol: float | None = None
    equality_atol: float = 1e-9
    nonsingular_margin: float = 1e-8

    def svd_cutoff(self, shape: tuple[int, int], sigma_max: float) -> float:
        rtol = self.rank_rtol
        if rtol is None:
            rtol = max(shape) * _EPS
        return rtol * sigma_max

    def with_atol(self, atol: float) -> "TolerancePolicy":
        return TolerancePolicy(self.rank_rtol, atol, self.nonsingular_margin)


DEFAULT_TOL = TolerancePolicy()


# ---------------------------------------------------------------------------
# exact elimination
# ---------------------------------------------------------------------------

def exact_rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over the Gaussian rationals.

    Returns ``(R, pivot_columns)``.  Pivot rows are chosen to minimise
    entry bit-size (then lowest row index), which keeps intermediate
    fractions small; the result is canonical regardless.
    """
    if not is_exact(m):
        raise TypeError("exact_rref requires the exact backend")
    r = m.copy()
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        candidates = [k for k in range(row, rows) if r[k, col]]
        if not candidates:
            continue
        best = min(candidates, key=lambda k: (_bit_size(r[k, col]), k))
        if best != row:
            r[[row, best], :] = r[[best, row], :]
        piv = r[row, col]
        if piv != _GR_ONE:
            r[row, :] = r[row, :] / piv
        for k in range(rows):
            if k != row and r[k, col]:
                r[k, :] = r[k, :] - r[k, col] * r[row, :]
        pivots.append(col)
        row += 1
    return r, pivots


def _exact_kernel(m: np.ndarray) -> np.ndarray:
    rref, pivots = exact_rref(m)
    cols = m.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = exact_zeros(cols, len(free))
    for j, f in enumerate(free):
        basis[f, j] = _GR_ONE
        for k, pc in enumerate(pivots):
            basis[pc, j] = -rref[k, f]
    return basis


# ---------------------------------------------------------------------------
# rank / kernel / range
# ---------------------------------------------------------------------------

def rank_and_kernel(
    m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL
) -> tuple[int, np.ndarray]:
    """Rank and a kernel basis (columns) in the input's backend.

    Floating kernels are orthonormal (right singular vectors); exact kernels
    come from the RREF free columns.
    """
    if m.ndim != 2:
        raise ValueError("rank_and_kernel expects a 2-D matrix")
    rows, cols = m.shape
    if cols == 0:
        return 0, m.reshape(0, 0) if is_exact(m) else np.zeros((0, 0), dtype=complex)
    if is_exact(m):
        _, pivots = exact_rref(m)
        return len(pivots), _exact_kernel(m)
    a = np.asarray(m, dtype=complex)
    if rows == 0:
        return 0, np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    cutoff = tol.svd_cutoff((rows, cols), s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    kernel = vh[rank:].conj().T
    return rank, kernel


def matrix_rank(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    return rank_and_kernel(m, tol)[0]


def kernel_basis(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    return rank_and_kernel(m, tol)[1]


def range_basis(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis (columns) of the column space, in the input's backend."""
    if is_exact(m):
        _, pivots = exact_rref(m)
        return m[:, pivots] if pivots else exact_zeros(m.shape[0], 0)
    a = np.asarray(m, dtype=complex)
    if a.shape[1] == 0 or a.shape[0] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    cutoff = tol.svd_cutoff(a.shape, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return u[:, :rank]


def _normalize_columns(m: np.ndarray) -> np.ndarray:
    if m.shape[1] == 0:
        return m
    norms = np.linalg.norm(m, axis=0)
    norms = np.where(norms > 0, norms, 1.0)
    return m / norms


def subspace_contains(
    big: np.ndarray, small: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL
) -> bool:
    """True when span(small columns) lies inside span(big columns).

    Exact inputs use a rank test on the concatenation.  Floating inputs
    project the unit-normalized columns of ``small`` onto span(big) and
    compare the leftover against ``tol.equality_atol`` (a rank cutoff at
    machine epsilon would reject containments that merely accumulated
    roundoff).  Columns of ``small`` with norm at or below the tolerance
    count as zero vectors, hence contained; without that floor they would
    be normalized into unit-length noise.  Mismatched row counts raise
    ``ValueError``.
    """
    if big.shape[0] != small.shape[0]:
        raise ValueError(
            f"ambient dimensions differ: {big.shape[0]} vs {small.shape[0]}"
        )
    if small.shape[1] == 0:
        return True
    if is_exact(big) != is_exact(small):
        big, small = to_float(big), to_float(small)
    if is_exact(big):
        stacked = np.concatenate([big, small], axis=1)
        return matrix_rank(stacked) == matrix_rank(big)
    s = np.asarray(small, dtype=complex)
    s = s[:, np.linalg.norm(s, axis=0) > tol.equality_atol]
    if s.shape[1] == 0:
        return True
    q = orthonormal_columns(np.asarray(big, dtype=complex), tol)
    s = _normalize_columns(s)
    leftover = s - q @ (np.conjugate(q).T @ s)
    return bool(np.max(np.abs(leftover)) <= tol.equality_atol)


def containment_residual(big: np.ndarray, small: np.ndarray) -> float:
    """Worst relative distance from columns of ``small`` to span(big).

    Floating diagnostic used in certificates; 0.0 for empty ``small``.
    """
    if big.shape[0] != small.shape[0]:
        raise ValueError("ambient dimensions differ")
    s = to_float(small)
    if s.shape[1] == 0:
        return 0.0
    q = orthonormal_columns(to_float(big))
    proj = q @ (conj_t(q) @ s) if q.shape[1] else np.zeros_like(s)
    worst = 0.0
    for j in range(s.shape[1]):
        denom = max(np.linalg.norm(s[:, j]), 1e-300)
        worst = max(worst, float(np.linalg.norm(s[:, j] - proj[:, j]) / denom))
    return worst


# ---------------------------------------------------------------------------
# solving / inversion
# ---------------------------------------------------------------------------

def exact_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a X = b exactly for square nonsingular exact ``a``."""
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("exact_solve requires a square matrix")
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    aug = np.concatenate([a, b], axis=1)
    rref, pivots = exact_rref(aug)
    if len(pivots) != n or pivots != list(range(n)):
        raise SingularMatrixError("exact_solve: singular coefficient matrix")
    return rref[:, n:]


def inverse(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Matrix inverse in the input's backend; raises SingularMatrixError."""
    if m.shape[0] != m.shape[1]:
        raise ValueError("inverse requires a square matrix")
    if is_exact(m):
        return exact_solve(m, exact_eye(m.shape[0]))
    a = np.asarray(m, dtype=complex)
    if not is_nonsingular(a, tol):
        raise SingularMatrixError("matrix is singular within tolerance")
    return np.linalg.inv(a)


def is_nonsingular(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Square matrix safely invertible (sigma_min/sigma_max above margin)."""
    if m.shape[0] != m.shape[1]:
        return False
    if m.shape[0] == 0:
        return True
    if is_exact(m):
        return matrix_rank(m) == m.shape[0]
    s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
    if s[0] == 0.0:
        return False
    return bool(s[-1] / s[0] > tol.nonsingular_margin)


# ---------------------------------------------------------------------------
# column selection and basis completion
# ---------------------------------------------------------------------------

def pivot_columns(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> list[int]:
    """Greedy leftmost maximal independent column set."""
    if is_exact(m):
        _, pivots = exact_rref(m)
        return pivots
    a = np.asarray(m, dtype=complex)
    kept: list[int] = []
    rank = 0
    for j in range(a.shape[1]):
        cand = a[:, kept + [j]]
        if matrix_rank(cand, tol) > rank:
            kept.append(j)
            rank += 1
    return kept


def orthonormal_columns(m: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span (floating; SVD-based)."""
    return range_basis(to_float(m), tol)


def complete_to_basis(
    b: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL, unitary: bool = False
) -> np.ndarray:
    """Square matrix whose first columns span col(b).

    ``unitary=True`` produces a unitary matrix (floating backend); otherwise
    the backend of ``b`` is kept and the span basis reuses columns of ``b``.
    """
    n = b.shape[0]
    if unitary:
        q = orthonormal_columns(b, tol)
        comp = kernel_basis(conj_t(q), tol) if q.shape[1] < n else np.zeros((n, 0), complex)
        out = np.concatenate([q, comp], axis=1)
        if out.shape[1] != n:
            raise SingularMatrixError("failed to complete to a unitary basis")
        return out
    cols = pivot_columns(b, tol)
    kept = b[:, cols] if cols else zeros_like_backend(n, 0, is_exact(b))
    eye = eye_like_backend(n, is_exact(b))
    out = kept
    rank = out.shape[1]
    for k in range(n):
        if rank == n:
            break
        cand = np.concatenate([out, eye[:, k : k + 1]], axis=1)
        if matrix_rank(cand, tol) > rank:
            out = cand
            rank += 1
    if rank != n:
        raise SingularMatrixError("failed to complete to a basis")
    return out


# ---------------------------------------------------------------------------
# Hermitian eigensolver (cyclic Jacobi) and unitary-multiple test
# ---------------------------------------------------------------------------

_MAX_JACOBI_SWEEPS = 60


def hermitian_eigen(
    h: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, real) and unitary eigenvectors of Hermitian h.

    Cyclic Jacobi with complex rotations.  Exact inputs are converted to
    floating first; input further than ``equality_atol`` (relative) from
    Hermitian raises :class:`NonHermitianError`.
    """
    a = to_float(h)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("hermitian_eigen requires a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    scale = max(max_abs(a), 1.0)
    if max_abs(a - conj_t(a)) > tol.equality_atol * scale:
        raise NonHermitianError("input is not Hermitian within tolerance")
    a = (a + conj_t(a)) / 2.0
    v = np.eye(n, dtype=complex)
    for _ in range(_MAX_JACOBI_SWEEPS):
        # Measure the off-diagonal mass from the entries themselves: the
        # difference of the full and diagonal Frobenius sums cancels to zero
        # once the true mass drops below sqrt(eps)*norm, ending the sweep
        # loop several digits too early.
        od = a.copy()
        np.fill_diagonal(od, 0.0)
        off = math.sqrt(float(np.sum(np.abs(od) ** 2)))
        norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
        if off <= n * _EPS * max(norm, 1e-300):
            break
        thresh = off / (n * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                r = abs(b)
                if r == 0.0 or r < thresh * 1e-8:
                    continue
                alpha = a[p, p].real
                delta = a[q, q].real
                tau = (alpha - delta) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(tau * tau + 1.0))
                else:
                    t = 1.0 / (tau - math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sig = t * c
                phase = b / r
                # unitary J = [[c, -sig*phase], [sig*conj(phase), c]] on (p, q)
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp + sig * phase * rq
                a[q, :] = -sig * np.conj(phase) * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp + sig * np.conj(phase) * cq
                a[:, q] = -sig * phase * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp + sig * np.conj(phase) * vq
                v[:, q] = -sig * phase * vp + c * vq
    evals = np.real(np.diag(a))
    order = np.argsort(-evals, kind="stable")
    return evals[order], v[:, order]


def unitary_multiple_test(
    s: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL
) -> tuple[float, np.ndarray] | None:
    """Decompose s = alpha * U (alpha >= 0, U unitary) or return None.

    Works by testing whether s s* is a scalar matrix.  The zero matrix
    returns ``(0.0, I)``.
    """
    a = to_float(s)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("unitary_multiple_test requires a square matrix")
    n = a.shape[0]
    if n == 0:
        return 0.0, np.zeros((0, 0), dtype=complex)
    p = a @ conj_t(a)
    c = float(np.real(np.trace(p))) / n
    off = max_abs(p - c * np.eye(n))
    if off > tol.equality_atol * max(1.0, abs(c)):
        return None
    alpha = math.sqrt(max(c, 0.0))
    if alpha <= tol.equality_atol:
        return 0.0, np.eye(n, dtype=complex)
    return alpha, a / alpha
