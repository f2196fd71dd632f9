import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divest.densities import cosine_density, sample
from divest.fourier import FrequencySet
from divest.functionals import (
    BMatrix,
    ImaginaryResidueError,
    PsiFunction,
    b_matrix,
    bilinear_functional,
    linear_functional,
    quadratic_functional,
    real_part,
)
from divest.quadrature import GridSpec
from divest.reference import naive_b_matrix, naive_bilinear, naive_quadratic


def test_linear_functional():
    x = np.array([[0.1], [0.3]])
    assert linear_functional(x, lambda z: 2 * z[:, 0]) == pytest.approx(0.4)
    assert linear_functional(x, 3.0) == 3.0
    with pytest.raises(ValueError):
        linear_functional(np.zeros((0, 1)), 1.0)


def test_psi_function():
    c = PsiFunction.constant(-2.0)
    assert c(np.zeros((3, 1))).tolist() == [-2.0] * 3
    assert c.check_bound(GridSpec(1, 4))
    assert not PsiFunction(lambda x: 3 * x[:, 0], bound=1.0).check_bound(GridSpec(1, 4))


def test_real_part_guard():
    assert real_part(1 + 1e-12j) == (1.0, 1e-12)
    with pytest.raises(ImaginaryResidueError):
        real_part(1 + 1e-3j)


def test_identity_b_matrix_matches_quadrature():
    M = FrequencySet(2, 1)
    g = GridSpec(2, 24)
    np.testing.assert_allclose(b_matrix(lambda x: np.ones(x.shape[0]), M, g).values,
                               BMatrix.analytic_identity(M).values, atol=1e-14)


@given(d=st.integers(1, 2), w=st.integers(0, 2), seed=st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_b_matrix_matches_naive(d, w, seed):
    rng = np.random.default_rng(seed)
    g = GridSpec(d, 8 * (2 * w + 1))
    vals = rng.normal(size=g.n_nodes)
    M = FrequencySet(d, w)
    np.testing.assert_allclose(b_matrix(vals, M, g).values, naive_b_matrix(vals, M, g), atol=1e-12)


def test_b_matrix_resolution_guard():
    with pytest.raises(ValueError, match="resolve"):
        b_matrix(np.ones(16), FrequencySet(1, 2), GridSpec(1, 16))
    with pytest.raises(ValueError, match="finite"):
        b_matrix(np.full(64, np.inf), FrequencySet(1, 1), GridSpec(1, 64))


@given(d=st.integers(1, 2), w=st.integers(0, 2), n=st.integers(2, 30), seed=st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_assemblies_match_naive(d, w, n, seed):
    rng = np.random.default_rng(seed)
    X, Y = rng.random((n, d)), rng.random((n + 3, d))
    M = FrequencySet(d, w)
    g = GridSpec(d, 8 * (2 * w + 1))
    B = b_matrix(rng.normal(size=g.n_nodes), M, g)
    psi_x, psi_y = rng.normal(size=n), rng.normal(size=n + 3)
    fast = quadratic_functional(X, psi_x, M, B)
    slow = naive_quadratic(X, psi_x, M, B.values)
    assert fast == pytest.approx(slow, rel=1e-10, abs=1e-10)
    assert bilinear_functional(X, Y, psi_y, M) == pytest.approx(naive_bilinear(X, Y, psi_y, M), rel=1e-10, abs=1e-10)


def test_projection_targets_are_unbiased():
    # [DERIVED] with psi = 1 and w >= 1: E theta(f^2) = 1 + a^2/2, E theta(fg) = 1 + ab/2
    a, b = 0.6, -0.4
    p, q = cosine_density(a), cosine_density(b)
    M = FrequencySet(1, 2)
    ident = BMatrix.analytic_identity(M)
    quad, bil = [], []
    for t in range(200):
        X, Y = sample(p, 200, (t, 0)), sample(q, 200, (t, 1))
        quad.append(quadratic_functional(X, 1.0, M, ident))
        bil.append(bilinear_functional(X, Y, 1.0, M))
    assert np.mean(quad) == pytest.approx(1 + a * a / 2, abs=0.01)
    assert np.mean(bil) == pytest.approx(1 + a * b / 2, abs=0.01)


def test_small_samples_rejected():
    M = FrequencySet(1, 1)
    with pytest.raises(ValueError):
        quadratic_functional(np.array([[0.5]]), 1.0, M, BMatrix.analytic_identity(M))
    with pytest.raises(ValueError):
        bilinear_functional(np.zeros((0, 1)), np.array([[0.5]]), 1.0, M)
