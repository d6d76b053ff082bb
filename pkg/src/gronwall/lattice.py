"""Finite-dimensional Banach lattice: R^n with componentwise order and sup norm.

Vectors are plain 1-D ``float64`` arrays. :func:`ordered` is the single entry
point that validates them; every other function calls it, so NaN or inf never
reaches an order comparison.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, InvariantError, ParameterError


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n`` nodes on ``[a, b]``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise ParameterError(f"grid needs finite a < b, got [{self.a}, {self.b}]")
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"grid needs n >= 2 nodes, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.linspace(self.a, self.b, self.n)
        t.flags.writeable = False
        return t

    def sample(self, f) -> np.ndarray:
        """Node values from a vectorised callable, a scalar, or a length-``n`` table."""
        if callable(f):
            return ordered(np.broadcast_to(f(self.nodes), (self.n,)))
        if np.ndim(f) == 0:
            return ordered(np.full(self.n, float(f)))
        return ordered(f, self.n)


def ordered(x, n=None) -> np.ndarray:
    """Validate ``x`` as a lattice element and return it as a float array.

    Raises :class:`InvariantError` on NaN/inf and :class:`DimensionError`
    when ``x`` is not one-dimensional or its length differs from ``n``.
    """
    arr = np.array(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"expected length {n}, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise InvariantError("lattice vectors must be finite (no NaN/inf)")
    return arr


def _pair(x, y):
    x = ordered(x)
    return x, ordered(y, x.shape[0])


# The public operations validate once; the underscored kernels assume
# already-validated arrays.


def _join(x, y):
    return np.maximum(x, y)


def _abs(x):
    # x v -x; maximum(0.0, -0.0) is -0.0, adding +0.0 normalises the signed zero
    return _join(x, -x) + 0.0


def join(x, y) -> np.ndarray:
    """Supremum ``x v y``."""
    return _join(*_pair(x, y))


def meet(x, y) -> np.ndarray:
    """Infimum, by De Morgan: ``x ^ y = -((-x) v (-y))``."""
    x, y = _pair(x, y)
    return -_join(-x, -y)


def abs_val(x) -> np.ndarray:
    """Lattice absolute value ``|x| = x v -x``."""
    return _abs(ordered(x))


def leq(x, y, tol=0.0) -> bool:
    """``True`` iff ``x_i <= y_i + tol`` for every component."""
    if tol < 0:
        raise ParameterError("tol must be nonnegative")
    x, y = _pair(x, y)
    return bool((x <= y + tol).all())


def sup_norm(x) -> float:
    x = ordered(x)
    if x.size == 0:
        return 0.0
    return float(_abs(x).max())


def positive_part(x) -> np.ndarray:
    """``x v 0``."""
    x = ordered(x)
    return _join(x, np.zeros_like(x))
