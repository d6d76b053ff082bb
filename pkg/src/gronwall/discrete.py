"""Gronwall bounds in R^n: the matrix form and the discrete (difference) form.

Sequences are 0-based: ``A`` has length ``m``, ``B`` has length ``m - 1``
(``B[j]`` multiplies ``x[j]`` in every later inequality), and the optional
``C`` has length ``m``. The inequality is

    x[i] <= A[i] + C[i] * sum_{j<i} B[j] x[j]

with ``C = 1`` when absent.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AdmissibilityError, DimensionError, InvariantError, ParameterError
from .lattice import leq, ordered, sup_norm
from .spectral import NonnegMatrix, as_nonneg, resolvent_direct

METHODS = (
    "matrix_sharp",
    "discrete_closed_form",
    "discrete_varcoef",
    "classic_exp",
    "varcoef_sharp",
    "varcoef_simple",
    "resolvent_kernel",
    "hat_majorant",
)


@dataclass(frozen=True)
class Admissibility:
    B_times_rho_upper: float
    admissible: bool


@dataclass
class BoundReport:
    """Outcome of a bound computation.

    ``sharpness_residual`` is ``||y - (A + K y)||_inf`` for the effective
    operator ``K`` of a sharp method and ``None`` for unsharp majorants.
    """

    bound: np.ndarray
    method: str
    admissibility: Admissibility
    sharpness_residual: Optional[float] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown bound method {self.method!r}")

    def to_dict(self):
        return {
            "bound": [float(v) for v in self.bound],
            "method": self.method,
            "admissibility": {
                "B_times_rho_upper": float(self.admissibility.B_times_rho_upper),
                "admissible": bool(self.admissibility.admissible),
            },
            "sharpness_residual": (
                None if self.sharpness_residual is None else float(self.sharpness_residual)
            ),
        }


NILPOTENT = Admissibility(0.0, True)


@dataclass(frozen=True)
class DiscreteInequality:
    A: np.ndarray
    B: np.ndarray
    C: Optional[np.ndarray] = None

    def __post_init__(self):
        A = ordered(self.A)
        B = ordered(self.B) if np.size(self.B) else np.zeros(0)
        if B.shape[0] != A.shape[0] - 1:
            raise DimensionError(f"B must have length len(A) - 1 = {A.shape[0] - 1}")
        if np.any(B < 0):
            raise InvariantError("discrete Gronwall coefficients B must be nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.C is not None:
            C = ordered(self.C, A.shape[0])
            if np.any(C < 0):
                raise InvariantError("variable factor C must be nonnegative")
            object.__setattr__(self, "C", C)

    @property
    def factor(self) -> np.ndarray:
        return np.ones_like(self.A) if self.C is None else self.C


def _admissibility(K, B):
    val = B * K.rho_upper
    return Admissibility(float(val), bool(val < 1))


def matrix_gronwall(K, A, B) -> BoundReport:
    """Sharp bound ``y = (I - BK)^{-1} A`` for ``x <= A + B K x``.

    Requires ``B * rho_upper(K) < 1``. Computed as ``(sI - K)^{-1} A / B`` with
    ``s = 1/B``, which is the same linear system scaled by ``B``.
    """
    K = as_nonneg(K)
    A = ordered(A, K.dim)
    if not B > 0:
        raise ParameterError("coupling constant B must be positive")
    adm = _admissibility(K, B)
    if not adm.admissible:
        raise AdmissibilityError(
            f"B * rho_upper = {adm.B_times_rho_upper!r} is not below 1",
            hypothesis="B * rho_K < 1",
            value=adm.B_times_rho_upper,
        )
    y = resolvent_direct(K, 1.0 / B, A) / B
    res = sup_norm(y - (A + B * (K.entries @ y)))
    return BoundReport(y, "matrix_sharp", adm, res)


def build_proof_matrix(B, C=None) -> NonnegMatrix:
    """Strictly lower-triangular ``K`` with ``K[i, j] = C[i] * B[j]`` for ``j < i``."""
    B = ordered(B) if np.size(B) else np.zeros(0)
    if np.any(B < 0):
        raise InvariantError("B must be nonnegative")
    m = B.shape[0] + 1
    K = np.tril(np.broadcast_to(np.concatenate([B, [0.0]]), (m, m)), -1)
    if C is not None:
        C = ordered(C, m)
        if np.any(C < 0):
            raise InvariantError("C must be nonnegative")
        K = C[:, None] * K
    return NonnegMatrix(K)


def discrete_bound(ineq: DiscreteInequality) -> BoundReport:
    """Closed form ``A_i + C_i sum_{j<i} A_j B_j prod_{s=j+1}^{i-1} (1 + B_s C_s)``.

    The empty product (``j = i - 1``) is 1 and the empty sum is 0.
    """
    A, B, C = ineq.A, ineq.B, ineq.factor
    m = A.shape[0]
    growth = 1.0 + B * C[:-1]
    y = A.copy()
    for i in range(1, m):
        # prods[j] = prod_{s=j+1}^{i-1} growth[s], built as a suffix product
        prods = np.ones(i)
        prods[:-1] = np.cumprod(growth[i - 1 : 0 : -1])[::-1]
        y[i] = A[i] + C[i] * np.dot(A[:i] * B[:i], prods)
    res = sup_norm(y - (A + C * np.concatenate([[0.0], np.cumsum(B * y[:-1])])))
    method = "discrete_closed_form" if ineq.C is None else "discrete_varcoef"
    return BoundReport(y, method, NILPOTENT, res)


def brute_force_discrete(ineq: DiscreteInequality) -> np.ndarray:
    """Extremal sequence: the recursion with equality, ``Y_k = A_k + C_k sum_{j<k} B_j Y_j``."""
    A, B, C = ineq.A, ineq.B, ineq.factor
    Y = np.empty_like(A)
    for k in range(A.shape[0]):
        s = 0.0
        for j in range(k):
            s += B[j] * Y[j]
        Y[k] = A[k] + C[k] * s
    return Y


@dataclass(frozen=True)
class Verification:
    feasible: bool
    bounded: bool


def verify_bound(K, A, B, x, tol) -> Verification:
    """Check ``x <= A + B K x`` (feasible) and ``x <= (I - BK)^{-1} A`` (bounded)."""
    K = as_nonneg(K)
    A = ordered(A, K.dim)
    x = ordered(x, K.dim)
    feasible = leq(x, A + B * (K.entries @ x), tol)
    bounded = leq(x, matrix_gronwall(K, A, B).bound, tol)
    return Verification(feasible, bounded)
