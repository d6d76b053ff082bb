"""Continuous Gronwall bounds for Volterra operators on a uniform grid.

Kernels live on the closed lower triangle ``a <= s <= t <= b`` and are stored
as ``n x n`` tables ``T[i, j] = k(t_i, t_j)`` with zeros above the diagonal.
Two quadratures are used deliberately:

* the left-endpoint rule (:func:`discretize_kernel`) gives a strictly
  lower-triangular, hence nilpotent, matrix, so the discrete operator keeps
  spectral bound exactly 0;
* the trapezoid rule (:func:`trapezoid_operator`) is used to evaluate the
  closed-form and series bounds themselves.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .discrete import NILPOTENT, BoundReport
from .errors import InvariantError, ParameterError, PreconditionError, ResourceError
from .lattice import Grid, ordered, sup_norm
from .spectral import NonnegMatrix

KERNEL_FORMS = ("constant", "separable", "tabulated", "closure")


class VolterraKernel:
    """Nonnegative continuous kernel ``k(t, s)`` sampled on a grid."""

    def __init__(self, grid: Grid, table, form="tabulated", sup_norm_bound=None, params=None):
        if form not in KERNEL_FORMS:
            raise ParameterError(f"unknown kernel form {form!r}")
        T = np.array(table, dtype=float)
        if T.shape != (grid.n, grid.n):
            raise ParameterError(f"kernel table must be {grid.n}x{grid.n}, got {T.shape}")
        T = np.tril(T)
        if not np.all(np.isfinite(T)):
            raise InvariantError("kernel samples must be finite")
        if np.any(T < 0):
            raise InvariantError("kernel must be nonnegative on the triangle s <= t")
        T.flags.writeable = False
        sampled = float(T.max())
        if sup_norm_bound is None:
            sup_norm_bound = sampled
        elif sup_norm_bound < sampled:
            raise InvariantError(
                f"declared sup norm {sup_norm_bound} is below the sampled maximum {sampled}"
            )
        self.grid = grid
        self.table = T
        self.form = form
        self.sup_norm_bound = float(sup_norm_bound)
        self.params = params or {}

    def __repr__(self):
        return f"VolterraKernel(form={self.form!r}, n={self.grid.n})"

    @classmethod
    def constant(cls, grid, value):
        if value < 0:
            raise InvariantError("constant kernel must be nonnegative")
        return cls(grid, np.full((grid.n, grid.n), float(value)), "constant", float(value),
                   {"value": float(value)})

    @classmethod
    def separable(cls, grid, C, B):
        """``k(t, s) = C(t) B(s)``; ``C`` and ``B`` are node values or callables."""
        c, b = grid.sample(C), grid.sample(B)
        if np.any(c < 0) or np.any(b < 0):
            raise InvariantError("separable kernel factors must be nonnegative")
        return cls(grid, np.outer(c, b), "separable", None, {"C": c, "B": b})

    @classmethod
    def tabulated(cls, grid, table, sup_norm_bound=None):
        return cls(grid, table, "tabulated", sup_norm_bound)

    @classmethod
    def from_function(cls, grid, f, sup_norm_bound=None):
        """Sample a vectorised ``f(t, s)`` on the lower triangle."""
        t = grid.nodes
        tt, ss = np.meshgrid(t, t, indexing="ij")
        vals = np.where(ss <= tt, np.broadcast_to(f(tt, ss), tt.shape), 0.0)
        return cls(grid, vals, "closure", sup_norm_bound)

    def __call__(self, i, j):
        return self.table[i, j]


@dataclass(frozen=True)
class CoefficientTriple:
    """Node values of ``A``, ``B >= 0`` and ``C >= 0`` for
    ``x(t) <= A(t) + C(t) int_a^t B(s) x(s) ds``."""

    grid: Grid
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "C"):
            v = getattr(self, name)
            if callable(v) or np.ndim(v) == 0:
                v = self.grid.sample(v)
            object.__setattr__(self, name, ordered(v, self.grid.n))
        if np.any(self.B < 0) or np.any(self.C < 0):
            raise InvariantError("coefficients B and C must be nonnegative")


def classic_bound(A, B, grid: Grid) -> np.ndarray:
    """``A e^{B (t - a)}`` on the grid nodes."""
    if B < 0:
        raise ParameterError("B must be nonnegative")
    return A * np.exp(B * (grid.nodes - grid.a))


def _cumtrapz(f, grid):
    return cumulative_trapezoid(f, dx=grid.h, initial=0.0)


def trapezoid_weights(n, h) -> np.ndarray:
    """``W[i, j]`` such that ``sum_j W[i, j] f_j`` is the trapezoid rule on ``[t_0, t_i]``."""
    W = np.tril(np.full((n, n), h), 0)
    idx = np.arange(1, n)
    W[idx, idx] = h / 2
    W[1:, 0] = h / 2
    W[0, 0] = 0.0
    return W


def lagged_trapezoid_weights(n, h) -> np.ndarray:
    """Strictly lower-triangular second-order weights for ``int_{t_0}^{t_i}``.

    Row ``i`` is the trapezoid rule on ``[t_0, t_{i-1}]`` plus the rectangle
    ``h f_{i-1}`` on the last cell. The weights are nonnegative, each row sums
    to ``t_i - t_0``, and the matrix is nilpotent; the per-row error is
    ``O(h^2)`` against ``O(h)`` for the left-endpoint rule.
    """
    W = np.zeros((n, n))
    W[1:] = trapezoid_weights(n, h)[:-1]
    idx = np.arange(1, n)
    W[idx, idx - 1] += h
    return W


def trapezoid_operator(k: VolterraKernel) -> np.ndarray:
    """Matrix of ``x -> int_a^t k(t, s) x(s) ds`` under the trapezoid rule."""
    return trapezoid_weights(k.grid.n, k.grid.h) * k.table


def classic_report(A, B, grid: Grid) -> BoundReport:
    y = classic_bound(A, B, grid)
    res = sup_norm(y - (A + B * _cumtrapz(y, grid)))
    return BoundReport(y, "classic_exp", NILPOTENT, res)


def _left_endpoint_integral(f, grid):
    # h * sum_{j<i} f_j
    return grid.h * np.concatenate([[0.0], np.cumsum(f[:-1])])


def varcoef_sharp_bound(c: CoefficientTriple) -> BoundReport:
    """``A(t) + C(t) int_a^t A(s) B(s) exp(int_s^t B C dr) ds`` by cumulative trapezoid.

    The inner exponent is a prefix integral ``Phi``, so the outer integrand
    factors as ``e^{Phi(t)} A B e^{-Phi(s)}`` and the whole evaluation is O(n).
    The reported residual is measured against the left-endpoint discretisation
    of ``x -> C(t) int_a^t B x``, so it decays like O(h).
    """
    g = c.grid
    phi = _cumtrapz(c.B * c.C, g)
    inner = np.exp(phi) * _cumtrapz(c.A * c.B * np.exp(-phi), g)
    y = c.A + c.C * inner
    res = sup_norm(y - (c.A + c.C * _left_endpoint_integral(c.B * y, g)))
    return BoundReport(y, "varcoef_sharp", NILPOTENT, res)


def _nondecreasing(v):
    scale = max(1.0, sup_norm(v))
    return bool(np.all(np.diff(v) >= -1e-12 * scale))


def varcoef_simple_bound(c: CoefficientTriple) -> BoundReport:
    """``A(t) exp(C(t) int_a^t B)``; needs ``A >= 0`` with ``A`` and ``C`` nondecreasing."""
    if np.any(c.A < 0):
        raise PreconditionError("simple majorant needs A >= 0")
    if not _nondecreasing(c.A):
        raise PreconditionError("simple majorant needs A nondecreasing")
    if not _nondecreasing(c.C):
        raise PreconditionError("simple majorant needs C nondecreasing")
    y = c.A * np.exp(c.C * _cumtrapz(c.B, c.grid))
    return BoundReport(y, "varcoef_simple", NILPOTENT, None)


def discretize_kernel(k: VolterraKernel) -> NonnegMatrix:
    """Left-endpoint matrix ``M[i, j] = h k(t_i, t_j)`` for ``j < i``."""
    return NonnegMatrix(k.grid.h * np.tril(k.table, -1))


def _next_iterate(T1, Tn, h):
    # trapezoid in r over [t_j, t_i] of T1[i, r] Tn[r, j]; the full product
    # already restricts r to j..i, the half weights fix the two endpoints
    P = T1 @ Tn
    P -= 0.5 * T1 * np.diag(Tn)[None, :]
    P -= 0.5 * np.diag(T1)[:, None] * Tn
    return np.tril(h * P)


def iterated_kernels(k: VolterraKernel, N: int) -> list:
    """Tables of ``k_1 = k`` and ``k_{n+1}(t, s) = int_s^t k(t, r) k_n(r, s) dr``."""
    if N < 1:
        raise ParameterError("need N >= 1 iterated kernels")
    T1 = np.array(k.table)
    out = [T1]
    for _ in range(N - 1):
        out.append(_next_iterate(T1, out[-1], k.grid.h))
    return out


def factorial_envelope(k: VolterraKernel, n: int) -> float:
    """Upper bound ``||k||^n (b - a)^{n-1} / (n-1)!`` on ``k_n`` over the triangle."""
    L = k.grid.b - k.grid.a
    return math.exp(n * math.log(k.sup_norm_bound) + (n - 1) * math.log(L) - math.lgamma(n)) \
        if k.sup_norm_bound > 0 else 0.0


def _series_tail(x, N, amplitude):
    # sum_{n > N} x^n / n!, bounded by a geometric series once x < N + 2
    if x == 0:
        return 0.0
    first = math.exp((N + 1) * math.log(x) - math.lgamma(N + 2))
    q = x / (N + 2)
    return amplitude * (first / (1 - q) if q < 1 else math.inf)


def truncation_index(k: VolterraKernel, A_norm: float, tail_tol: float, limit=10**6) -> int:
    """Smallest ``N >= 1`` with ``||k||^{N+1} (b-a)^{N+1} ||A|| / N! < tail_tol``."""
    x = k.sup_norm_bound * (k.grid.b - k.grid.a)
    if x == 0 or A_norm == 0:
        return 1
    for N in range(1, limit):
        if math.log(A_norm) + (N + 1) * math.log(x) - math.lgamma(N + 1) < math.log(tail_tol):
            return N
    raise ResourceError("no admissible truncation index found", required=limit)


def resolvent_kernel_bound(k: VolterraKernel, A, tail_tol=1e-10, max_terms=200) -> BoundReport:
    """``A(t) + int_a^t R_N(t, s) A(s) ds`` with ``R_N = k_1 + ... + k_N``.

    ``N`` comes from the certified factorial envelope of the iterated kernels,
    never from observed decay. ``extras`` holds ``N`` and the certified tail.
    """
    if not tail_tol > 0:
        raise ParameterError("tail_tol must be positive")
    A = ordered(A, k.grid.n)
    a_norm = sup_norm(A)
    N = truncation_index(k, a_norm, tail_tol)
    if N > max_terms:
        raise ResourceError(
            f"resolvent series needs N = {N} iterated kernels, cap is {max_terms}", required=N
        )
    R = np.sum(iterated_kernels(k, N), axis=0)
    W = trapezoid_weights(k.grid.n, k.grid.h)
    y = A + (W * R) @ A
    res = sup_norm(y - (A + (W * k.table) @ y))
    x = k.sup_norm_bound * (k.grid.b - k.grid.a)
    tail = _series_tail(x, N, a_norm)
    return BoundReport(y, "resolvent_kernel", NILPOTENT, res, {"terms": N, "tail_bound": tail})


def hat_majorant_bound(k: VolterraKernel, A) -> BoundReport:
    """``A^(t) exp(int_a^t k^(t, s) ds)`` with running maxima
    ``A^(t) = max_{r<=t} A(r)`` and ``k^(t, s) = max_{s<=r<=t} k(r, s)``."""
    A = ordered(A, k.grid.n)
    A_hat = np.maximum.accumulate(A)
    # rows above the diagonal are zero and k >= 0, so a plain column-wise
    # running max equals the max over s <= r <= t
    k_hat = np.tril(np.maximum.accumulate(k.table, axis=0))
    W = trapezoid_weights(k.grid.n, k.grid.h)
    y = A_hat * np.exp((W * k_hat).sum(axis=1))
    return BoundReport(y, "hat_majorant", NILPOTENT, None)


@dataclass(frozen=True)
class QuasinilpotenceReport:
    gelfand_values: np.ndarray
    envelope: np.ndarray
    decreasing_to_zero: bool
    final_value: float


def quasinilpotence_check(k: VolterraKernel, m_max: int) -> QuasinilpotenceReport:
    """Gelfand values ``||M^m||_inf^{1/m}`` of the left-endpoint matrix.

    A strictly lower-triangular ``M`` with entries at most ``h ||k||`` has
    ``||M^m||_inf <= (||k|| (b - a))^m / m!`` (count the decreasing index chains),
    which is the envelope the values are checked against.
    """
    if m_max < 2:
        raise ParameterError("m_max must be at least 2")
    M = discretize_kernel(k).entries
    x = k.sup_norm_bound * (k.grid.b - k.grid.a)
    vals = np.empty(m_max)
    env = np.empty(m_max)
    P = np.eye(M.shape[0])
    for m in range(1, m_max + 1):
        P = P @ M
        vals[m - 1] = float(np.abs(P).sum(axis=1).max()) ** (1.0 / m)
        env[m - 1] = x * math.exp(-math.lgamma(m + 1) / m) if x > 0 else 0.0
    below = bool(np.all(vals <= env * (1 + 1e-10) + 1e-300))
    shrinking = vals[-1] == 0.0 or vals[-1] < vals[0]
    return QuasinilpotenceReport(vals, env, below and shrinking, float(vals[-1]))
