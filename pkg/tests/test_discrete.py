import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gronwall.discrete import (
    BoundReport,
    DiscreteInequality,
    brute_force_discrete,
    build_proof_matrix,
    discrete_bound,
    matrix_gronwall,
    verify_bound,
)
from gronwall.errors import AdmissibilityError, DimensionError, InvariantError, ParameterError
from gronwall.lattice import leq
from gronwall.spectral import spectral_bound


@st.composite
def inequalities(draw, varcoef=None):
    m = draw(st.integers(1, 20))
    A = draw(arrays(np.float64, m, elements=st.floats(0, 2)))
    B = draw(arrays(np.float64, m - 1, elements=st.floats(0, 2)))
    use_c = draw(st.booleans()) if varcoef is None else varcoef
    C = draw(arrays(np.float64, m, elements=st.floats(0, 2))) if use_c else None
    return DiscreteInequality(A, B, C)


def rel(x, y):
    return np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300)) if len(x) else 0.0


def test_doubling_example():
    rep = discrete_bound(DiscreteInequality([1, 1, 1], [1, 1]))
    assert rep.bound.tolist() == [1.0, 2.0, 4.0]
    assert rep.method == "discrete_closed_form"
    assert rep.sharpness_residual == 0.0


def test_variable_factor_example():
    rep = discrete_bound(DiscreteInequality([1, 1, 1], [1, 1], [1, 2, 3]))
    assert rep.bound.tolist() == [1.0, 3.0, 13.0]
    assert rep.method == "discrete_varcoef"


def test_single_term():
    assert discrete_bound(DiscreteInequality([2.5], [])).bound.tolist() == [2.5]


def test_proof_matrix_shape():
    K = build_proof_matrix([1.0, 2.0], [1.0, 1.0, 3.0])
    assert K.entries.tolist() == [[0, 0, 0], [1, 0, 0], [3, 6, 0]]
    assert spectral_bound(K).upper == 0.0


def test_matrix_gronwall_example():
    rep = matrix_gronwall([[2.0, 1.0], [1.0, 2.0]], [1.0, -1.0], 0.2)
    assert np.allclose(rep.bound, [1.25, -1.25], rtol=1e-14)
    assert rep.admissibility.admissible
    assert abs(rep.admissibility.B_times_rho_upper - 0.6) < 1e-9


def test_matrix_gronwall_inadmissible():
    with pytest.raises(AdmissibilityError) as info:
        matrix_gronwall([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], 0.5)
    assert info.value.hypothesis == "B * rho_K < 1"
    assert info.value.value >= 1


def test_matrix_gronwall_rejects_nonpositive_B():
    with pytest.raises(ParameterError):
        matrix_gronwall([[1.0]], [1.0], 0.0)


def test_validation():
    with pytest.raises(DimensionError):
        DiscreteInequality([1, 1], [1, 1])
    with pytest.raises(InvariantError):
        DiscreteInequality([1, 1], [-1])
    with pytest.raises(InvariantError):
        DiscreteInequality([1, 1], [1], [1, -1])
    with pytest.raises(ParameterError):
        BoundReport(np.zeros(1), "nope", None)


def test_report_to_dict():
    d = discrete_bound(DiscreteInequality([1, 1], [1])).to_dict()
    assert d == {
        "bound": [1.0, 2.0],
        "method": "discrete_closed_form",
        "admissibility": {"B_times_rho_upper": 0.0, "admissible": True},
        "sharpness_residual": 0.0,
    }


@given(inequalities())
def test_three_routes_agree(ineq):
    closed = discrete_bound(ineq).bound
    brute = brute_force_discrete(ineq)
    via = matrix_gronwall(build_proof_matrix(ineq.B, ineq.C), ineq.A, 1.0).bound
    assert rel(closed, brute) <= 1e-12
    assert rel(via, closed) <= 1e-12


@given(inequalities(), st.data())
def test_feasible_sequences_are_bounded(ineq, data):
    m = len(ineq.A)
    slack = data.draw(arrays(np.float64, m, elements=st.floats(0, 1)))
    x = brute_force_discrete(DiscreteInequality(ineq.A - slack, ineq.B, ineq.C))
    K = build_proof_matrix(ineq.B, ineq.C)
    v = verify_bound(K, ineq.A, 1.0, x, 1e-9 * (1 + np.abs(x).max()))
    assert v.feasible and v.bounded


def test_sharpness_is_attained(rng):
    K = rng.uniform(0, 1, (8, 8))
    B = 0.5 / spectral_bound(K).upper
    A = rng.uniform(-1, 1, 8)
    y = matrix_gronwall(K, A, B).bound
    assert np.max(np.abs(y - (A + B * K @ y))) < 1e-12
    v = verify_bound(K, A, B, y + 1e-3, 1e-12)
    assert not v.bounded


@given(inequalities(varcoef=False), st.floats(0, 1))
def test_monotone_in_A(ineq, bump):
    y = discrete_bound(ineq).bound
    y2 = discrete_bound(DiscreteInequality(ineq.A + bump, ineq.B)).bound
    assert leq(y, y2)
