"""Semilinear problems ``Lx = N(x), Px = x0`` in the integral form ``x = x0 + K N(x)``.

``K`` is a nonnegative matrix (a discretised positive right inverse of ``L``)
and ``N`` a lattice-Lipschitz map with declared constant ``C``:
``|N(x) - N(y)| <= C |x - y|`` componentwise. Uniqueness and continuous
dependence need only ``C * rho(K) < 1``; for a Volterra ``K`` that holds for
every ``C`` because ``rho(K) = 0``.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AdmissibilityError, DivergenceError, ParameterError
from .lattice import Grid, abs_val, leq, ordered, sup_norm
from .spectral import NonnegMatrix, as_nonneg, resolvent_direct
from .volterra import VolterraKernel, discretize_kernel, lagged_trapezoid_weights

DIVERGENCE_LIMIT = 1e10


def _linear(M):
    M = np.asarray(M, dtype=float)
    return lambda x: M @ x


def _scale(c=1.0, d=0.0):
    return lambda x: c * x + d


def _sin(c=1.0, omega=1.0, d=0.0):
    return lambda x: c * np.sin(omega * x) + d


def _exp(c=1.0, rate=1.0):
    return lambda x: c * np.exp(rate * x)


def _poly(coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    return lambda x: np.polynomial.polynomial.polyval(x, coeffs)


NONLINEARITIES = {
    "linear": _linear,
    "scale": _scale,
    "sin": _sin,
    "exp": _exp,
    "poly": _poly,
}


def make_nonlinearity(name, **params) -> Callable:
    """Look up a named nonlinearity; no arbitrary code is ever evaluated."""
    try:
        factory = NONLINEARITIES[name]
    except KeyError:
        raise ParameterError(f"unknown nonlinearity {name!r}; choose from {sorted(NONLINEARITIES)}")
    return factory(**params)


@dataclass(frozen=True)
class SemilinearProblem:
    """Data of ``x = x0 + K N(x)``. ``N`` must be a pure function."""

    K: NonnegMatrix
    x0: np.ndarray
    N: Callable
    C: float

    def __post_init__(self):
        K = as_nonneg(self.K)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "x0", ordered(self.x0, K.dim))
        if self.C < 0:
            raise ParameterError("lattice-Lipschitz constant must be nonnegative")

    def T(self, x) -> np.ndarray:
        """Fixed-point map ``x0 + K N(x)``."""
        return self.x0 + self.K.entries @ np.asarray(self.N(x), dtype=float)

    def residual(self, x) -> float:
        return sup_norm(np.asarray(x) - self.T(x))

    @property
    def C_times_rho(self) -> float:
        return self.C * self.K.rho_upper


IVP_RULES = ("left", "lagged_trapezoid")


def volterra_ivp(grid: Grid, N, x_init, C, rule="left") -> SemilinearProblem:
    """``x' = N(x)``, ``x(a) = x_init`` as ``x = x_init + K N(x)``.

    ``K`` integrates from ``a`` to each node and is strictly lower-triangular
    (nilpotent) under both rules: ``"left"`` is the left-endpoint matrix
    (explicit Euler, O(h)); ``"lagged_trapezoid"`` is trapezoid up to the
    previous node plus a left rectangle on the last cell (O(h^2)).
    """
    if rule == "left":
        K = discretize_kernel(VolterraKernel.constant(grid, 1.0))
    elif rule == "lagged_trapezoid":
        K = NonnegMatrix(lagged_trapezoid_weights(grid.n, grid.h))
    else:
        raise ParameterError(f"unknown IVP rule {rule!r}; choose from {IVP_RULES}")
    x0 = np.broadcast_to(np.asarray(x_init, dtype=float), (grid.n,))
    return SemilinearProblem(K, x0, N, C)


def require_admissible(p: "SemilinearProblem"):
    """Raise :class:`AdmissibilityError` unless ``C * rho_upper(K) < 1``."""
    val = p.C_times_rho
    if not val < 1:
        raise AdmissibilityError(
            f"C * rho_upper = {val!r} is not below 1", hypothesis="C * rho_K < 1", value=val
        )


@dataclass(frozen=True)
class SolveTrace:
    iterates_norms: np.ndarray
    converged: bool
    iterations: int
    final_residual: float


@dataclass(frozen=True)
class PicardResult:
    x: np.ndarray
    trace: SolveTrace


def picard_solve(p: SemilinearProblem, tol=1e-10, max_iter=10_000, start=None) -> PicardResult:
    """Successive approximation ``x_{k+1} = x0 + K N(x_k)`` starting from ``x0``.

    Stops when the step and the fixed-point residual are both below ``tol``.
    Exhausting ``max_iter`` returns ``converged=False``; iterates above
    ``1e10`` in sup norm raise :class:`DivergenceError`.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    x = p.x0.copy() if start is None else ordered(start, p.K.dim)
    steps = []
    converged = False
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        x_new = p.T(x)
        size = sup_norm(x_new) if np.all(np.isfinite(x_new)) else np.inf
        if size > DIVERGENCE_LIMIT:
            raise DivergenceError(f"Picard iterate {it} has sup norm {size:.3g}")
        step = sup_norm(x_new - x)
        steps.append(step)
        x = x_new
        if step < tol:
            res = p.residual(x)
            if res <= tol:
                converged = True
                break
    else:
        res = p.residual(x)
    trace = SolveTrace(np.array(steps), converged, it, float(res))
    return PicardResult(x, trace)


def lattice_lipschitz_estimate(N, domain_samples) -> float:
    """Empirical lower bound on the lattice-Lipschitz constant of ``N``.

    ``max |N(x)_i - N(y)_i| / max(|x_i - y_i|, 1e-30)`` over the sample pairs.
    This is a probe, not a certificate: admissibility always uses the declared C.
    """
    pairs = list(domain_samples)
    if not pairs:
        raise ParameterError("need at least one sample pair")
    best = 0.0
    for x, y in pairs:
        x = ordered(x)
        y = ordered(y, x.shape[0])
        num = np.abs(np.asarray(N(x), dtype=float) - np.asarray(N(y), dtype=float))
        den = np.maximum(np.abs(x - y), 1e-30)
        best = max(best, float(np.max(num / den)))
    return best


@dataclass(frozen=True)
class UniquenessResult:
    both_solutions: bool
    coincide: bool
    distance: float
    bound: float


def _resolvent_CK(p, v):
    # (I - C K)^{-1} v
    if p.C == 0:
        return np.array(v, dtype=float)
    return resolvent_direct(p.K, 1.0 / p.C, v) / p.C


def uniqueness_certificate(p: SemilinearProblem, x1, x2, tol) -> UniquenessResult:
    """Check that two approximate solutions coincide up to their residuals.

    With ``r_k = x_k - T(x_k)``, ``z = |x1 - x2|`` obeys ``z <= C K z + |r1| + |r2|``,
    hence ``z <= (I - CK)^{-1} (|r1| + |r2|)``; that vector's sup norm is the
    reported ``bound``.
    """
    require_admissible(p)
    x1 = ordered(x1, p.K.dim)
    x2 = ordered(x2, p.K.dim)
    r1 = x1 - p.T(x1)
    r2 = x2 - p.T(x2)
    both = sup_norm(r1) <= tol and sup_norm(r2) <= tol
    z = abs_val(x1 - x2)
    dist = sup_norm(z)
    if both:
        envelope = _resolvent_CK(p, abs_val(r1) + abs_val(r2))
        slack = 1e-12 * (1.0 + max(sup_norm(x1), sup_norm(x2)))
        coincide = leq(z, envelope, slack)
        bound = sup_norm(envelope)
    else:
        coincide = dist <= tol
        bound = float("nan")
    return UniquenessResult(bool(both), bool(coincide), dist, bound)


def continuous_dependence_bound(p: SemilinearProblem, x0_hat) -> np.ndarray:
    """``(I - CK)^{-1} |x0 - x0_hat|``, a componentwise bound on ``|x - x_hat|``."""
    require_admissible(p)
    x0_hat = ordered(x0_hat, p.K.dim)
    return _resolvent_CK(p, abs_val(p.x0 - x0_hat))
