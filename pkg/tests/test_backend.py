import os
import subprocess
import sys

import numpy as np
import pytest

from divest import _backend, _fallback
from divest.kernels import legendre_kernel


def _case(rng, n, q, d):
    xs = rng.random((n, d))
    xs = xs[np.argsort(xs[:, 0], kind="stable")]
    return xs, rng.uniform(-0.2, 1.2, (q, d))


@pytest.mark.skipif(_backend.BACKEND != "compiled", reason="compiled core not built")
@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("order", [0, 2, 4])
def test_compiled_matches_numpy(d, order):
    from divest import _core

    rng = np.random.default_rng(d * 10 + order)
    xs, qs = _case(rng, 300, 200, d)
    c = legendre_kernel(order).coeffs
    for h in (0.01, 0.2, 0.5):
        a = _core.kde_sum(xs, qs, c, h)
        b = _fallback.kde_sum(xs, qs, c, h)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_fallback_against_brute_force():
    rng = np.random.default_rng(5)
    xs, qs = _case(rng, 40, 30, 2)
    k = legendre_kernel(2)
    h = 0.3
    brute = np.array([np.prod(k((q - xs) / h), axis=1).sum() for q in qs])
    np.testing.assert_allclose(_fallback.kde_sum(xs, qs, k.coeffs, h), brute, rtol=1e-12, atol=1e-13)


def test_support_edge_is_excluded():
    xs = np.array([[0.0], [0.5]])
    qs = np.array([[0.1], [0.6]])
    # |u| = 1 exactly contributes nothing
    out = _backend.kde_sum(xs, qs, np.array([0.5]), 0.1)
    assert out.tolist() == [0.0, 0.0]


def test_env_var_forces_fallback():
    env = dict(os.environ, DIVEST_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import divest; print(divest.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
