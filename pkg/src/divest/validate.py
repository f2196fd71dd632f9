"""Self-checks run by ``divest validate``."""
import numpy as np

from . import _backend, _fallback
from .estimators import EstimatorConfig, l2_squared, t_linear, t_quadratic
from .fourier import FrequencySet, basis_table
from .functionals import bilinear_functional
from .kernels import kernel_moment, legendre_kernel, strict_floor
from .quadrature import GridSpec
from . import reference


def check_kernel_moments():
    worst = 0.0
    for s in (1, 2, 3, 4):
        k = legendre_kernel(strict_floor(s))
        worst = max(worst, abs(kernel_moment(k, 0) - 1.0))
        for r in range(1, k.order + 1):
            worst = max(worst, abs(kernel_moment(k, r)))
    return worst <= 1e-8, f"max moment error {worst:.2e}"


def check_orthonormality():
    worst = 0.0
    for d, w, pts in ((1, 3, 2048), (2, 1, 64)):
        grid = GridSpec(d, pts)
        M = FrequencySet(d, w)
        tab = basis_table(grid.nodes, M)
        gram = np.conj(tab).T @ tab / grid.n_nodes
        worst = max(worst, float(np.abs(gram - np.eye(M.size)).max()))
    return worst <= 1e-8, f"max Gram deviation {worst:.2e}"


def _rel(a, b, scale):
    return abs(a - b) / max(1.0, scale)


def check_oracle_equivalence(cases=6, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(cases):
        d = 1 + i % 2
        n = int(rng.integers(16, 41))
        a, b = rng.uniform(-1.0, 2.0, size=2)
        X, Y = rng.random((n, d)), rng.random((n, d))
        cfg = EstimatorConfig(alpha=a, beta=b, d=d, kappa_l=0.3, kappa_u=3.0, c_m=2.0,
                              grid=GridSpec(d, 64 if d == 1 else 40))
        est = t_quadratic(X, Y, cfg)
        ref, terms = reference.naive_t_quadratic(X, Y, cfg)
        worst = max(worst, _rel(est.value, ref, sum(abs(v) for v in terms.values())))
        est = t_linear(X, Y, cfg)
        ref, terms = reference.naive_t_linear(X, Y, cfg)
        worst = max(worst, _rel(est.value, ref, sum(abs(v) for v in terms.values())))
        est = l2_squared(X, Y, cfg)
        ref, terms = reference.naive_l2(X, Y, cfg)
        worst = max(worst, _rel(est.value, ref, sum(abs(v) for v in terms.values())))
        M = FrequencySet(d, 2)
        psi = rng.normal(size=n)
        worst = max(worst, _rel(bilinear_functional(X, Y, psi, M), reference.naive_bilinear(X, Y, psi, M), 1.0))
    return worst <= 1e-10, f"max relative deviation {worst:.2e}"


def check_backends(seed=0):
    if _backend.BACKEND != "compiled":
        return True, "compiled core not in use; numpy fallback active"
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (1, 2):
        xs = rng.random((500, d))
        xs = xs[np.argsort(xs[:, 0], kind="stable")]
        qs = rng.random((300, d))
        coeffs = legendre_kernel(3).coeffs
        a = _backend.kde_sum(xs, qs, coeffs, 0.2)
        b = _fallback.kde_sum(xs, qs, coeffs, 0.2)
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    return worst <= 1e-12, f"compiled vs numpy max deviation {worst:.2e}"


CHECKS = {
    "kernel moments": check_kernel_moments,
    "basis orthonormality": check_orthonormality,
    "oracle equivalence": check_oracle_equivalence,
    "backend agreement": check_backends,
}


def run_checks(out=print):
    ok = True
    for name, check in CHECKS.items():
        passed, detail = check()
        ok &= passed
        out(f"{'pass' if passed else 'FAIL'}  {name}: {detail}")
    return ok
