"""Perron-root brackets and resolvent evaluators for nonnegative matrices.

Three independent routes to ``(sI - K)^{-1} A`` live here:

* :func:`resolvent_direct` - a dense (or triangular) linear solve; ground truth.
* :func:`resolvent_laplace` - Simpson quadrature of ``int_0^r e^{-t(sI-K)} A dt``.
* :func:`neumann_resolvent` - partial sums of ``sum_j K^j A / s^{j+1}``.

All of them refuse to run unless ``s`` exceeds the certified upper end of the
Collatz-Wielandt bracket returned by :func:`spectral_bound`.
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AdmissibilityError,
    ConvergenceError,
    DimensionError,
    InvariantError,
    NumericError,
    ParameterError,
)
from .lattice import ordered, sup_norm

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpectralBracket:
    """Certified enclosure ``lower <= rho(K) <= upper``."""

    lower: float
    upper: float
    iterations: int
    converged: bool

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


class NonnegMatrix:
    """Square matrix with nonnegative finite entries, i.e. a positive operator on R^n.

    The spectral bracket is computed lazily and cached; the entries are stored
    read-only so the cache cannot go stale.
    """

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvariantError("matrix entries must be finite")
        if np.any(arr < 0):
            raise InvariantError("positive operator required: matrix has a negative entry")
        arr.flags.writeable = False
        self.entries = arr

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, x):
        return self.entries @ x

    def __repr__(self):
        return f"NonnegMatrix(dim={self.dim})"

    @cached_property
    def inf_norm(self) -> float:
        return float(np.max(self.entries.sum(axis=1))) if self.dim else 0.0

    @cached_property
    def is_lower_triangular(self) -> bool:
        return not np.any(np.triu(self.entries, 1))

    @cached_property
    def bracket(self) -> SpectralBracket:
        """Bracket at the default tolerance ``1e-10 * max(1, ||K||_inf)``."""
        return spectral_bound(self, tol=1e-10 * max(1.0, self.inf_norm))

    @property
    def rho_upper(self) -> float:
        return self.bracket.upper


def as_nonneg(K) -> NonnegMatrix:
    return K if isinstance(K, NonnegMatrix) else NonnegMatrix(K)


def _block_bracket(B, tol, max_iter):
    """Collatz-Wielandt bracket for one irreducible diagonal block."""
    m = B.shape[0]
    if m == 1:
        r = float(B[0, 0])
        return r, r, 0, True
    # Any shift eps > 0 makes B + eps*I primitive. Quotients are formed with B
    # itself, so the shift only affects the convergence rate, never the bounds.
    shift = tol / 10 + 0.5 * float(np.max(B.sum(axis=1)))
    x = np.ones(m)
    lo, hi = 0.0, math.inf
    it = 0
    best, stalled = math.inf, 0
    for it in range(1, max_iter + 1):
        Bx = B @ x
        q = Bx / x
        qmin, qmax = float(q.min()), float(q.max())
        if not (math.isfinite(qmin) and math.isfinite(qmax)):
            raise NumericError("non-finite Collatz-Wielandt quotient")
        # guard the floating-point rounding of each quotient
        lo = max(lo, qmin * (1 - 8 * _EPS))
        hi = min(hi, qmax * (1 + 8 * _EPS))
        if hi - lo <= tol:
            return lo, hi, it, True
        # the width can stall at the rounding floor above tol; stop honestly
        if hi - lo < best * (1 - 1e-3):
            best, stalled = hi - lo, 0
        else:
            stalled += 1
            if stalled >= 50:
                break
        y = Bx + shift * x
        x = y / y.max()
        if x.min() <= 0.0:
            raise NumericError("Perron iterate underflowed to zero")
    return lo, hi, it, False


def spectral_bound(K, tol=1e-10, max_iter=10_000) -> SpectralBracket:
    """Bracket the Perron root (= spectral bound) of a nonnegative matrix.

    The matrix is split into strongly connected components; on each
    irreducible diagonal block the shifted power iterate ``x > 0`` gives the
    two-sided Collatz-Wielandt bound ``min (Bx)_i/x_i <= rho(B) <= max (Bx)_i/x_i``.
    The Perron root of ``K`` is the largest block root, so reducible and
    nilpotent matrices are handled exactly (a strictly lower-triangular matrix
    yields ``[0, 0]``).
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    K = as_nonneg(K)
    A = K.entries
    n = K.dim
    if n == 0:
        return SpectralBracket(0.0, 0.0, 0, True)
    if K.is_lower_triangular or not np.any(np.tril(A, -1)):
        # triangular: the spectrum is the diagonal, so the root is exact
        r = float(np.max(np.diag(A)))
        return SpectralBracket(r, r, 0, True)
    ncomp, labels = connected_components(csr_matrix(A > 0), directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=ncomp)
    # singleton components contribute their diagonal entry
    single = sizes[labels] == 1
    lower = upper = float(np.max(np.diag(A)[single])) if single.any() else 0.0
    iterations = 0
    for c in np.flatnonzero(sizes > 1):
        idx = np.flatnonzero(labels == c)
        lo, hi, it, _ = _block_bracket(A[np.ix_(idx, idx)], tol, max_iter)
        lower = max(lower, lo)
        upper = max(upper, hi)
        iterations = max(iterations, it)
    return SpectralBracket(float(lower), float(upper), iterations, bool(upper - lower <= tol))


def _check_admissible(K, s):
    rho = K.rho_upper
    if not s > rho:
        raise AdmissibilityError(
            f"s = {s!r} does not exceed the spectral bound bracket upper end {rho!r}",
            hypothesis="s > rho_K",
            value=float(s),
        )
    return rho


def resolvent_direct(K, s, A, full_output=False):
    """Solve ``(sI - K) y = A``.

    Lower-triangular ``K`` (the Volterra and discrete-Gronwall cases) is solved
    by forward substitution, which is componentwise accurate for the M-matrix
    ``sI - K``; everything else goes through LU with partial pivoting.

    With ``full_output=True`` also returns the scaled residual
    ``||sy - Ky - A||_inf / (1 + ||A||_inf)``.
    """
    K = as_nonneg(K)
    A = ordered(A, K.dim)
    _check_admissible(K, s)
    M = s * np.eye(K.dim) - K.entries
    try:
        if K.is_lower_triangular:
            y = scipy.linalg.solve_triangular(M, A, lower=True, check_finite=False)
        else:
            y = np.linalg.solve(M, A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular resolvent system: {exc}") from exc
    if not np.all(np.isfinite(y)):
        raise NumericError("resolvent solve produced non-finite values")
    if full_output:
        res = sup_norm(s * y - K.entries @ y - A) / (1.0 + sup_norm(A))
        return y, res
    return y


def _taylor_degree(norm, rtol=1e-16):
    # smallest m with norm^(m+1)/(m+1)! * e^norm below rtol
    m, term = 0, 1.0
    while True:
        m += 1
        term *= norm / m
        if term * norm / (m + 1) * math.exp(norm) < rtol or m >= 60:
            return m


def expm(M):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    norm = float(np.max(np.abs(M).sum(axis=0))) if n else 0.0
    if not math.isfinite(norm):
        raise NumericError("matrix exponential of a non-finite matrix")
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = M / 2.0**squarings
    deg = _taylor_degree(norm / 2.0**squarings)
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, deg + 1):
        term = term @ X / k
        E = E + term
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            E = E @ E
    if not np.all(np.isfinite(E)):
        raise NumericError("matrix exponential overflowed; reduce t*||M||")
    return E


def expm_action(M, t, x):
    """``e^{tM} x``. For entrywise nonnegative ``M`` every Taylor term and every
    squaring is nonnegative, so ``x >= 0`` maps to a nonnegative result."""
    if t < 0:
        raise ParameterError("t must be nonnegative")
    M = np.asarray(M, dtype=float)
    x = ordered(x, M.shape[0])
    if t == 0:
        return x.copy()
    return expm(t * M) @ x


def laplace_radius(A, s, rho_upper, tol):
    """Smallest ``r`` with ``||A|| e^{-r(s-rho)}/(s-rho) <= tol``."""
    gap = s - rho_upper
    if not gap > 0:
        raise AdmissibilityError("s must exceed rho_K", hypothesis="s > rho_K", value=float(s))
    scale = max(sup_norm(A), 1e-300)
    return max(math.log(scale / (gap * tol)) / gap, 0.0)


def resolvent_laplace(K, s, A, r, steps):
    """Composite-Simpson value of ``int_0^r e^{-t(sI-K)} A dt``.

    The truncation error is ``(sI-K)^{-1} e^{-r(sI-K)} A``; choose ``r`` via
    :func:`laplace_radius`. Odd ``steps`` are rounded up to the next even value.
    """
    K = as_nonneg(K)
    A = ordered(A, K.dim)
    _check_admissible(K, s)
    if steps < 2:
        raise ParameterError("Simpson quadrature needs steps >= 2")
    if not r > 0:
        raise ParameterError("integration radius r must be positive")
    steps = int(steps) + (int(steps) % 2)
    dt = r / steps
    step = expm(dt * (K.entries - s * np.eye(K.dim)))
    v = A.copy()
    acc = v.copy()
    for k in range(1, steps + 1):
        v = step @ v
        w = 1.0 if k == steps else (4.0 if k % 2 else 2.0)
        acc += w * v
    if not np.all(np.isfinite(acc)):
        raise NumericError("Laplace quadrature overflowed")
    return acc * dt / 3.0


def neumann_resolvent(K, s, A, max_terms=10_000, tail_tol=1e-12, full_output=False):
    """Partial sum of ``sum_j K^j A / s^{j+1}`` for ``(sI - K)^{-1} A``.

    Summation stops once the estimated tail is below ``tail_tol``. The tail is
    estimated geometrically from ``q = ||K||_inf / s`` when that is below one,
    otherwise from the observed ratio of successive term norms.
    """
    K = as_nonneg(K)
    A = ordered(A, K.dim)
    _check_admissible(K, s)
    q_norm = K.inf_norm / s
    term = A / s
    total = term.copy()
    prev = sup_norm(term)
    for j in range(1, max_terms + 1):
        term = (K.entries @ term) / s
        total += term
        cur = sup_norm(term)
        if cur == 0.0:
            tail = 0.0
            break
        q = q_norm if q_norm < 1 else (cur / prev if prev > 0 else math.inf)
        tail = cur * q / (1 - q) if q < 1 else math.inf
        if tail <= tail_tol:
            break
        prev = cur
    else:
        raise ConvergenceError(
            f"Neumann series did not reach tail {tail_tol:g} in {max_terms} terms"
        )
    if full_output:
        return total, tail
    return total
