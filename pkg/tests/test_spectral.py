import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gronwall.errors import AdmissibilityError, DimensionError, InvariantError, ParameterError
from gronwall.lattice import leq
from gronwall.spectral import (
    NonnegMatrix,
    expm,
    expm_action,
    laplace_radius,
    neumann_resolvent,
    resolvent_direct,
    resolvent_laplace,
    spectral_bound,
)

SHIFT = np.array([[0.0, 0.0], [1.0, 0.0]])


def nonneg_matrices(max_n=6):
    return st.integers(1, max_n).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=st.floats(0, 10))
    )


@pytest.mark.parametrize(
    "K,rho",
    [
        ([[0.0, 1.0], [1.0, 0.0]], 1.0),
        ([[2.0, 1.0], [1.0, 2.0]], 3.0),
        ([[0.5]], 0.5),
        (np.zeros((3, 3)), 0.0),
        ([[1.0, 5.0], [0.0, 2.0]], 2.0),
    ],
)
def test_bracket_known_roots(K, rho):
    br = spectral_bound(K, tol=1e-10)
    assert br.converged
    assert br.lower <= rho <= br.upper
    assert br.width <= 1e-10


def test_nilpotent_bracket_is_exact_zero():
    br = spectral_bound(np.tril(np.ones((6, 6)), -1))
    assert (br.lower, br.upper) == (0.0, 0.0)


def test_bracket_types_are_python():
    br = spectral_bound([[1.0, 2.0], [3.0, 4.0]])
    assert type(br.lower) is float and type(br.converged) is bool


def test_bracket_matches_eigvals(rng):
    K = rng.uniform(0, 1, (20, 20)) * (rng.uniform(size=(20, 20)) < 0.3)
    br = spectral_bound(K, tol=1e-9)
    rho = np.max(np.abs(np.linalg.eigvals(K)))
    assert br.lower - 1e-9 <= rho <= br.upper + 1e-9


@given(nonneg_matrices())
def test_bracket_encloses_perron_root(K):
    br = spectral_bound(K, tol=1e-8 * max(1.0, K.sum(axis=1).max()))
    rho = np.max(np.abs(np.linalg.eigvals(K)))
    slack = 1e-7 * max(1.0, rho)
    assert br.lower - slack <= rho <= br.upper + slack


def test_nonneg_matrix_validation():
    with pytest.raises(InvariantError):
        NonnegMatrix([[1.0, -1.0], [0.0, 1.0]])
    with pytest.raises(InvariantError):
        NonnegMatrix([[np.nan]])
    with pytest.raises(DimensionError):
        NonnegMatrix([[1.0, 2.0]])
    K = NonnegMatrix([[1.0]])
    with pytest.raises(ValueError):
        K.entries[0, 0] = 2.0


def test_resolvent_routes_agree_on_shift():
    A = np.array([1.0, 1.0])
    y = resolvent_direct(SHIFT, 1.0, A)
    assert y.tolist() == [1.0, 2.0]
    r = laplace_radius(A, 1.0, 0.0, 1e-12)
    assert np.allclose(resolvent_laplace(SHIFT, 1.0, A, r, 2000), [1.0, 2.0], rtol=1e-8)
    assert np.allclose(neumann_resolvent(SHIFT, 1.0, A), [1.0, 2.0], rtol=0, atol=1e-14)


def test_resolvent_full_output():
    y, res = resolvent_direct([[2.0, 1.0], [1.0, 2.0]], 4.0, [1.0, 0.0], full_output=True)
    assert np.allclose(y, np.linalg.solve([[2.0, -1.0], [-1.0, 2.0]], [1.0, 0.0]))
    assert res < 1e-15


@pytest.mark.parametrize("fn", [resolvent_direct, neumann_resolvent])
def test_resolvent_inadmissible(fn):
    with pytest.raises(AdmissibilityError) as info:
        fn([[2.0, 1.0], [1.0, 2.0]], 3.0, [1.0, 1.0])
    assert info.value.hypothesis == "s > rho_K"


def test_laplace_parameter_checks():
    with pytest.raises(ParameterError):
        resolvent_laplace(SHIFT, 1.0, [1.0, 1.0], 10.0, 1)
    with pytest.raises(ParameterError):
        resolvent_laplace(SHIFT, 1.0, [1.0, 1.0], 0.0, 10)


def test_laplace_odd_steps_rounded_up():
    A = [1.0, 1.0]
    assert np.array_equal(resolvent_laplace(SHIFT, 2.0, A, 20.0, 101),
                          resolvent_laplace(SHIFT, 2.0, A, 20.0, 102))


def test_neumann_tail(rng):
    K = rng.uniform(0, 1, (5, 5))
    s = 2 * np.max(np.abs(np.linalg.eigvals(K))) + 1
    A = rng.uniform(0, 1, 5)
    yn, tail = neumann_resolvent(K, s, A, tail_tol=1e-13, full_output=True)
    assert tail <= 1e-13
    assert np.max(np.abs(yn - np.linalg.solve(s * np.eye(5) - K, A))) < 1e-11


def test_expm_matches_closed_forms():
    assert np.allclose(expm([[0.0, 1.0], [0.0, 0.0]]), [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)
    t = 1.3
    R = expm([[0.0, -t], [t, 0.0]])
    assert np.allclose(R, [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]], atol=1e-14)
    assert np.allclose(expm(np.diag([1.0, -40.0])), np.diag([np.e, np.exp(-40.0)]), rtol=1e-13)


def test_expm_action_positive(rng):
    M = rng.uniform(0, 3, (6, 6))
    x = rng.uniform(0, 1, 6)
    y = expm_action(M, 2.0, x)
    assert leq(np.zeros(6), y)
    assert np.array_equal(expm_action(M, 0.0, x), x)
    with pytest.raises(ParameterError):
        expm_action(M, -1.0, x)


@given(nonneg_matrices(5), st.floats(1.05, 4.0))
def test_resolvent_is_positive_operator(K, factor):
    s = factor * max(spectral_bound(K).upper, 1e-3)
    A = np.ones(K.shape[0])
    y = resolvent_direct(K, s, A)
    assert leq(np.zeros_like(y), y, 1e-12 * (1 + np.abs(y).max()))
