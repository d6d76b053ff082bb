"""The 1-D Dirichlet Laplacian on [0, 1] and its maximum principle.

``L_h = h^{-2} tridiag(-1, 2, -1)`` acts on the ``n`` interior nodes
``t_i = i h`` with ``h = 1/(n + 1)``; boundary values are carried separately.
Its inverse, the Green matrix, is the positive right inverse ``K`` and
``lambda_1 = 1 / rho(K)`` is the admissibility threshold ``B < lambda_1``.

In 1-D the kernel of ``L`` is the affine functions (dimension 2), not the
infinite-dimensional space of harmonic functions one gets in higher
dimension; everything else carries over.
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import AdmissibilityError, DimensionError, ParameterError, ResourceError
from .lattice import leq, ordered, positive_part
from .spectral import NonnegMatrix, SpectralBracket, spectral_bound

MAX_NODES = 5000


def discrete_lambda1(n: int) -> float:
    """Closed form ``4/h^2 sin^2(pi h / 2)`` of the smallest eigenvalue of ``L_h``."""
    h = 1.0 / (n + 1)
    return 4.0 / h**2 * math.sin(math.pi * h / 2) ** 2


@dataclass(frozen=True, eq=False)
class DirichletLaplacian1D:
    n: int
    L: np.ndarray
    green: NonnegMatrix
    mu1: SpectralBracket
    green_min_raw: float = 0.0

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.n + 1) * self.h

    @property
    def lambda1(self) -> float:
        return 1.0 / self.mu1.midpoint

    @property
    def lambda1_lower(self) -> float:
        """Conservative (smallest) value, used for the admissibility test."""
        return 1.0 / self.mu1.upper

    @cached_property
    def first_eigenvector(self) -> np.ndarray:
        """``sin(pi t_i)``; an exact eigenvector of the three-point stencil."""
        return np.sin(math.pi * self.nodes)

    def neg_laplacian(self, x, boundary=(0.0, 0.0)) -> np.ndarray:
        """Discrete ``-x''`` at the interior nodes given the two boundary values."""
        x = ordered(x, self.n)
        full = np.concatenate([[boundary[0]], x, [boundary[1]]])
        return (2 * full[1:-1] - full[:-2] - full[2:]) / self.h**2

    def harmonic_part(self, boundary) -> np.ndarray:
        """The affine interpolant of the boundary values, i.e. ``x - K L x``."""
        b0, b1 = boundary
        return b0 + (b1 - b0) * self.nodes


def build_laplacian(n: int) -> DirichletLaplacian1D:
    if int(n) != n or n < 2:
        raise ParameterError("need n >= 2 interior nodes")
    if n > MAX_NODES:
        raise ResourceError(f"n = {n} exceeds the dense storage cap {MAX_NODES}", required=n)
    h = 1.0 / (n + 1)
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    L = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
    banded = np.zeros((3, n))
    banded[0, 1:] = off
    banded[1] = main
    banded[2, :-1] = off
    G = scipy.linalg.solve_banded((1, 1), banded, np.eye(n))
    # symmetric and positive in exact arithmetic; clamp rounding noise only
    G = 0.5 * (G + G.T)
    raw_min = float(G.min())
    G = np.where(G < 0, 0.0, G)
    green = NonnegMatrix(G)
    mu1 = spectral_bound(green, tol=1e-11 * float(G.max()))
    L.flags.writeable = False
    return DirichletLaplacian1D(n, L, green, mu1, raw_min)


def green_apply(op: DirichletLaplacian1D, f) -> np.ndarray:
    """Solve ``-z'' = f`` with ``z(0) = z(1) = 0``: ``z = K f``."""
    f = ordered(f, op.n)
    return op.green.entries @ f


def continuous_green_oracle(t: float, s: float) -> float:
    """``min(t, s) (1 - max(t, s))``, the Green function of ``-d^2/dt^2`` on [0, 1]."""
    if not (0.0 <= t <= 1.0 and 0.0 <= s <= 1.0):
        raise ParameterError("Green function arguments must lie in [0, 1]")
    return min(t, s) * (1.0 - max(t, s))


@dataclass(frozen=True)
class MaxPrincipleResult:
    premises_hold: bool
    conclusion_holds: bool
    certificate: np.ndarray


def max_principle_check(op: DirichletLaplacian1D, x, boundary, B, tol,
                        enforce_admissibility=True) -> MaxPrincipleResult:
    """Test ``-x'' <= Bx``, ``x|_bdry <= 0`` and the conclusion ``x <= 0``.

    The certificate is ``w = (I - B K)^{-1} (K d+ - P x)`` where ``d = Bx + x''``
    is the defect and ``P x`` the harmonic part. When the premises hold,
    ``d >= 0`` and ``P x <= 0``, so ``w >= 0`` is a positive operator applied to
    nonnegative data and ``x = -w``.

    ``enforce_admissibility=False`` skips the ``B < lambda_1`` gate; it exists
    only to exhibit counterexamples above the threshold.
    """
    x = ordered(x, op.n)
    boundary = tuple(float(v) for v in boundary)
    if len(boundary) != 2:
        raise DimensionError("boundary must be a pair of values")
    if B < 0:
        raise ParameterError("B must be nonnegative")
    if enforce_admissibility and not B < op.lambda1_lower:
        raise AdmissibilityError(
            f"B = {B!r} is not below lambda_1 = {op.lambda1_lower!r}",
            hypothesis="B < lambda_1", value=float(B),
        )
    defect = B * x - op.neg_laplacian(x, boundary)
    premises = bool(np.all(defect >= -tol) and max(boundary) <= tol)
    conclusion = leq(x, np.zeros(op.n), tol)
    K = op.green.entries
    rhs = K @ positive_part(defect) - op.harmonic_part(boundary)
    if B == 0:
        cert = rhs
    else:
        cert = np.linalg.solve(np.eye(op.n) - B * K, rhs)
    return MaxPrincipleResult(premises, conclusion, cert)
