import math

import numpy as np
import pytest

from gronwall.errors import AdmissibilityError, DimensionError, ParameterError, ResourceError
from gronwall.laplacian import (
    MAX_NODES,
    build_laplacian,
    continuous_green_oracle,
    discrete_lambda1,
    green_apply,
    max_principle_check,
)
from gronwall.lattice import leq


@pytest.fixture(scope="module")
def op100():
    return build_laplacian(100)


@pytest.mark.parametrize("n", [50, 100, 200])
def test_lambda1_closed_form(n):
    op = build_laplacian(n)
    assert abs(op.lambda1 - discrete_lambda1(n)) <= 1e-10 * discrete_lambda1(n)
    assert op.lambda1_lower <= discrete_lambda1(n) * (1 + 1e-12)


def test_first_eigenvector(op100):
    v = op100.first_eigenvector
    assert np.allclose(op100.L @ v, discrete_lambda1(100) * v, rtol=1e-10)


def test_green_is_inverse(op100):
    assert np.allclose(op100.L @ op100.green.entries, np.eye(100), atol=1e-9)
    assert op100.green_min_raw >= -1e-12


def test_green_apply_exact_on_quadratic(op100):
    # -z'' = 2 with z(0) = z(1) = 0 is t (1 - t); the 3-point stencil is exact
    t = op100.nodes
    assert np.allclose(green_apply(op100, np.full(100, 2.0)), t * (1 - t), atol=1e-13)


def test_green_matches_continuous_oracle(op100):
    t = op100.nodes
    G = np.array([[continuous_green_oracle(a, b) for b in t] for a in t])
    assert np.max(np.abs(op100.green.entries / op100.h - G)) < 1e-12


def test_oracle_domain():
    assert continuous_green_oracle(0.25, 0.5) == 0.125
    with pytest.raises(ParameterError):
        continuous_green_oracle(1.5, 0.5)


def test_size_limits():
    with pytest.raises(ParameterError):
        build_laplacian(1)
    with pytest.raises(ResourceError):
        build_laplacian(MAX_NODES + 1)


def test_neg_laplacian_with_boundary(op100):
    t = op100.nodes
    assert np.allclose(op100.neg_laplacian(1 + 2 * t, (1.0, 3.0)), 0.0, atol=1e-8)
    assert np.allclose(op100.harmonic_part((1.0, 3.0)), 1 + 2 * t)


def test_max_principle_eigenvector(op100):
    out = max_principle_check(op100, -op100.first_eigenvector, (0.0, 0.0), 5.0, 1e-9)
    assert out.premises_hold and out.conclusion_holds
    assert np.allclose(out.certificate, op100.first_eigenvector, atol=1e-10)


def test_max_principle_witness_beyond_lambda1(op100):
    B = 1.5 * op100.lambda1
    out = max_principle_check(op100, op100.first_eigenvector, (0.0, 0.0), B, 1e-9,
                              enforce_admissibility=False)
    assert out.premises_hold and not out.conclusion_holds


def test_max_principle_gate(op100):
    with pytest.raises(AdmissibilityError) as info:
        max_principle_check(op100, np.zeros(100), (0.0, 0.0), op100.lambda1, 1e-9)
    assert info.value.hypothesis == "B < lambda_1"
    with pytest.raises(ParameterError):
        max_principle_check(op100, np.zeros(100), (0.0, 0.0), -1.0, 1e-9)
    with pytest.raises(DimensionError):
        max_principle_check(op100, np.zeros(99), (0.0, 0.0), 1.0, 1e-9)


def test_max_principle_random_sound(op100, rng):
    K = op100.green.entries
    for _ in range(200):
        B = rng.uniform(0, 0.95) * op100.lambda1
        g = -rng.uniform(0, 1, 100)
        bdry = tuple(-rng.uniform(0, 1, 2))
        # x = P x + B K x + K g, i.e. -x'' = B x + g with g <= 0
        x = np.linalg.solve(np.eye(100) - B * K, op100.harmonic_part(bdry) + K @ g)
        out = max_principle_check(op100, x, bdry, B, 1e-9)
        assert out.premises_hold
        assert leq(x, np.zeros(100), 1e-9)


def test_lambda1_converges_second_order():
    errs = [abs(build_laplacian(n).lambda1 - math.pi**2) for n in (50, 100, 200)]
    hs = [1 / 51, 1 / 101, 1 / 201]
    orders = [math.log(errs[i] / errs[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(2)]
    assert all(abs(p - 2.0) < 0.1 for p in orders)
