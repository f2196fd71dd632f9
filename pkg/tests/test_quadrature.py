import numpy as np
import pytest

from divest.quadrature import DEFAULT_POINTS, GridSpec, default_grid, evaluate_on_grid, integrate, integrate_complex


def test_nodes_are_midpoints_in_c_order():
    g = GridSpec(2, 2)
    np.testing.assert_allclose(g.nodes, [[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])
    assert g.n_nodes == 4
    assert not g.nodes.flags.writeable


def test_constant_integrates_exactly():
    for d in (1, 2, 3):
        assert integrate(lambda x: np.full(x.shape[0], 2.5), GridSpec(d, 7)) == pytest.approx(2.5, abs=1e-14)


def test_trig_polynomial_exact_below_nyquist():
    # the midpoint rule is exact for exp(2 pi i k x) with 0 < |k| < N
    g = GridSpec(1, 16)
    for k in range(1, 16):
        assert abs(integrate_complex(lambda x: np.exp(2j * np.pi * k * x[:, 0]), g)) < 1e-14


def test_smooth_integrand_converges():
    # [DERIVED] int_0^1 x^2 dx = 1/3; midpoint error is -1/(12 N^2)
    g = GridSpec(1, 1000)
    val = integrate(lambda x: x[:, 0] ** 2, g)
    assert val == pytest.approx(1 / 3 - 1 / (12 * 1000**2), abs=1e-14)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_values_name_a_node():
    with pytest.raises(ValueError, match="node"):
        integrate(lambda x: 1.0 / (x[:, 0] - 0.5), GridSpec(1, 3))
    with pytest.raises(ValueError):
        integrate(lambda x: np.log(x[:, 0] - 0.9), GridSpec(1, 4))


def test_default_grid_sizes_and_guard():
    for d, pts in DEFAULT_POINTS.items():
        assert default_grid(d).points_per_axis == pts
    with pytest.raises(ValueError):
        GridSpec(4, 1000)
    assert GridSpec(4, 1000, allow_large=True).n_nodes == 10**12
    with pytest.raises(ValueError):
        GridSpec(0, 4)


def test_evaluate_on_grid_shape():
    g = GridSpec(2, 3)
    assert evaluate_on_grid(lambda x: x.sum(axis=1), g).shape == (9,)
