import math

import numpy as np
import pytest

from gronwall.errors import InvariantError, ParameterError, PreconditionError, ResourceError
from gronwall.lattice import Grid, leq
from gronwall.suites import random_coefficients, random_kernel
from gronwall.volterra import (
    CoefficientTriple,
    VolterraKernel,
    classic_bound,
    classic_report,
    discretize_kernel,
    factorial_envelope,
    hat_majorant_bound,
    iterated_kernels,
    quasinilpotence_check,
    resolvent_kernel_bound,
    trapezoid_weights,
    truncation_index,
    varcoef_sharp_bound,
    varcoef_simple_bound,
)

G201 = Grid(0.0, 1.0, 201)


def test_classic_is_e():
    assert abs(classic_bound(1.0, 1.0, Grid(0.0, 1.0, 101))[-1] - math.e) <= 1e-12
    rep = classic_report(1.0, 1.0, G201)
    assert rep.method == "classic_exp"
    # trapezoid residual of the exact exponential: O(h^2)
    assert rep.sharpness_residual < 1e-5


def test_classic_zero_B_is_constant():
    assert classic_bound(2.0, 0.0, G201).tolist() == [2.0] * 201
    with pytest.raises(ParameterError):
        classic_bound(1.0, -1.0, G201)


def test_varcoef_linear_A():
    # x <= t + int_0^t x  ->  e^t - 1
    c = CoefficientTriple(G201, lambda t: t, 1.0, 1.0)
    y = varcoef_sharp_bound(c).bound
    assert np.max(np.abs(y - np.expm1(G201.nodes))) < 1e-5


def test_varcoef_residual_first_order():
    res = []
    for n in (101, 201, 401):
        g = Grid(0.0, 1.0, n)
        c = CoefficientTriple(g, lambda t: 1 + t**2, lambda t: 1 + 0.5 * np.sin(5 * t), lambda t: 1 + t)
        res.append(varcoef_sharp_bound(c).sharpness_residual)
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(orders > 0.9)


def test_simple_preconditions():
    g = Grid(0.0, 1.0, 11)
    with pytest.raises(PreconditionError):
        varcoef_simple_bound(CoefficientTriple(g, -1.0, 1.0, 1.0))
    with pytest.raises(PreconditionError):
        varcoef_simple_bound(CoefficientTriple(g, lambda t: 1 - t, 1.0, 1.0))
    with pytest.raises(PreconditionError):
        varcoef_simple_bound(CoefficientTriple(g, 1.0, 1.0, lambda t: 2 - t))
    with pytest.raises(InvariantError):
        CoefficientTriple(g, 1.0, -1.0, 1.0)


def test_sharp_le_simple_random(rng):
    g = Grid(0.0, 1.0, 51)
    for _ in range(50):
        c = random_coefficients(rng, g)
        s = varcoef_simple_bound(c).bound
        assert leq(varcoef_sharp_bound(c).bound, s, 1e-9 * s.max())


def test_kernel_validation():
    g = Grid(0.0, 1.0, 3)
    with pytest.raises(InvariantError):
        VolterraKernel.constant(g, -1.0)
    with pytest.raises(InvariantError):
        VolterraKernel.tabulated(g, -np.ones((3, 3)))
    with pytest.raises(ParameterError):
        VolterraKernel.tabulated(g, np.ones((2, 2)))
    with pytest.raises(InvariantError):
        VolterraKernel.tabulated(g, 2 * np.ones((3, 3)), sup_norm_bound=1.0)
    k = VolterraKernel.tabulated(g, np.ones((3, 3)) + np.triu(-np.ones((3, 3)) * 5, 1))
    assert np.array_equal(k.table, np.tril(np.ones((3, 3))))


def test_separable_kernel():
    g = Grid(0.0, 1.0, 4)
    k = VolterraKernel.separable(g, lambda t: 1 + t, 2.0)
    assert np.allclose(k.table, np.tril(np.outer(1 + g.nodes, 2 * np.ones(4))))


def test_trapezoid_weights_integrate_linear():
    W = trapezoid_weights(11, 0.1)
    t = np.linspace(0, 1, 11)
    assert np.allclose(W @ t, t**2 / 2, atol=1e-15)


def test_discretized_kernel_is_nilpotent():
    M = discretize_kernel(VolterraKernel.constant(G201, 3.0))
    assert M.is_lower_triangular and M.rho_upper == 0.0


def test_constant_kernel_iterates():
    g = Grid(0.0, 1.0, 101)
    tt, ss = np.meshgrid(g.nodes, g.nodes, indexing="ij")
    for m, T in enumerate(iterated_kernels(VolterraKernel.constant(g, 1.5), 3), 1):
        exact = np.tril(1.5**m * (tt - ss) ** (m - 1) / math.factorial(m - 1))
        assert np.max(np.abs(T - exact)) < 1e-12


def test_factorial_envelope_values():
    k = VolterraKernel.constant(Grid(0.0, 2.0, 5), 3.0)
    assert factorial_envelope(k, 1) == pytest.approx(3.0)
    assert factorial_envelope(k, 3) == pytest.approx(27 * 4 / 2)
    assert factorial_envelope(VolterraKernel.constant(G201, 0.0), 4) == 0.0


def test_truncation_index_definition():
    k = VolterraKernel.constant(G201, 1.0)
    N = truncation_index(k, 1.0, 1e-10)
    assert 1 / math.factorial(N) < 1e-10 <= 1 / math.factorial(N - 1)


def test_resolvent_kernel_matches_exponential():
    k = VolterraKernel.constant(G201, 1.0)
    rep = resolvent_kernel_bound(k, np.ones(201), tail_tol=1e-10)
    assert np.max(np.abs(rep.bound - np.exp(G201.nodes))) <= 1e-3 + 1e-10
    assert rep.extras["tail_bound"] <= 1e-10
    assert rep.method == "resolvent_kernel"


def test_resolvent_kernel_term_cap():
    with pytest.raises(ResourceError):
        resolvent_kernel_bound(VolterraKernel.constant(G201, 50.0), np.ones(201), max_terms=10)


def test_hat_equals_exponential_for_constant_data():
    k = VolterraKernel.constant(G201, 2.0)
    assert np.allclose(hat_majorant_bound(k, 3.0 * np.ones(201)).bound, 3 * np.exp(2 * G201.nodes),
                       rtol=1e-14)


def test_resolvent_le_hat_random(rng):
    g = Grid(0.0, 1.0, 41)
    gaps = []
    for _ in range(100):
        k, A = random_kernel(rng, g)
        r = resolvent_kernel_bound(k, A).bound
        h = hat_majorant_bound(k, A).bound
        assert leq(r, h, 1e-9 * h.max())
        gaps.append(np.max((h - r) / h))
    assert max(gaps) > 0.01


def test_quasinilpotence():
    q = quasinilpotence_check(VolterraKernel.constant(Grid(0.0, 1.0, 100), 1.0), 20)
    assert q.decreasing_to_zero
    assert q.final_value == pytest.approx(0.10863677647384273, rel=1e-9)
    assert np.all(q.gelfand_values <= q.envelope)
    with pytest.raises(ParameterError):
        quasinilpotence_check(VolterraKernel.constant(G201, 1.0), 1)


def test_lagged_trapezoid_weights():
    from gronwall.volterra import lagged_trapezoid_weights

    W = lagged_trapezoid_weights(4, 1.0)
    assert W.tolist() == [[0, 0, 0, 0], [1, 0, 0, 0], [0.5, 1.5, 0, 0], [0.5, 1, 1.5, 0]]
    t = np.linspace(0, 1, 21)
    # exact for constants on every row and for linears from row 2 on
    W = lagged_trapezoid_weights(21, 0.05)
    assert np.allclose(W.sum(axis=1), t)
