"""Plug-in, first-order and second-order corrected estimators of
``T(p, q) = int p^alpha q^beta`` and the divergences built on them."""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .densities import divergence_from_T
from .fourier import frequency_set
from .functionals import BMatrix, b_matrix, bilinear_functional, quadratic_functional
from .kde import as_points, bandwidth, fit, truncate
from .kernels import KernelD, kernel_for_smoothness
from .quadrature import GridSpec, default_grid, integrate_values

ESTIMATORS = ("plugin", "linear", "quadratic")
COEF_ATOL = 1e-12


@dataclass(frozen=True)
class EstimatorConfig:
    """Every tuning constant of the estimators.

    ``eps`` defaults to ``0.1 * kappa_l``, ``s_prime`` to ``s - 0.01`` and
    ``grid`` to the default midpoint grid for ``d``.
    """

    alpha: float = 0.5
    beta: float = 0.5
    s: float = 2.0
    d: int = 1
    kappa_l: float = 0.1
    kappa_u: float = 10.0
    eps: float = None
    c_h: float = 1.0
    c_m: float = 1.0
    s_prime: float = None
    grid: GridSpec = None
    estimator: str = "linear"
    lattice_mode: str = "plain"

    def __post_init__(self):
        if self.eps is None:
            object.__setattr__(self, "eps", 0.1 * self.kappa_l)
        if self.s_prime is None:
            object.__setattr__(self, "s_prime", self.s - 0.01)
        if self.grid is None:
            object.__setattr__(self, "grid", default_grid(self.d))
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")
        if self.s <= 0 or self.s_prime <= 0:
            raise ValueError(f"smoothness must be positive, got s={self.s}, s_prime={self.s_prime}")
        if not self.kappa_l - self.eps > 0:
            raise ValueError(f"kappa_l - eps must be positive, got {self.kappa_l} - {self.eps}")
        if not self.kappa_l <= self.kappa_u:
            raise ValueError("need kappa_l <= kappa_u")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")
        if self.grid.d != self.d:
            raise ValueError("grid dimension differs from d")

    @property
    def kernel(self):
        return KernelD(kernel_for_smoothness(self.s), self.d)


@dataclass
class Estimate:
    value: float
    estimator: str
    h: tuple = None
    m: int = None
    residue: float = 0.0
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"{self.estimator} estimate is not finite: {self.value}")

    def summary(self):
        lines = [f"estimator: {self.estimator}", f"value: {self.value:.10g}"]
        if self.h is not None:
            lines.append("bandwidth: " + ", ".join(f"{v:.6g}" for v in self.h))
        if self.m is not None:
            lines.append(f"basis size: {self.m}")
        lines.append(f"imaginary residue: {self.residue:.3g}")
        lines.extend(f"  {k}: {v:.10g}" for k, v in self.terms.items())
        return "\n".join(lines)


def c1(alpha, beta):
    return 1.0 - alpha - beta


def c2(alpha, beta):
    return 1.0 - 1.5 * (alpha + beta) + 0.5 * (alpha + beta) ** 2


def _snap(c):
    # alpha + beta = 1 in exact arithmetic may leave a rounding residue
    return 0.0 if abs(c) < COEF_ATOL else c


def split_half(x):
    """First half fits densities, second half (same size) feeds the sums."""
    half = x.shape[0] // 2
    return x[:half], x[half:2 * half]


def _check_pair(X, Y, cfg):
    X = as_points(X, cfg.d)
    Y = as_points(Y, cfg.d)
    for name, z in (("X", X), ("Y", Y)):
        if z.shape[0] and (z.min() < 0.0 or z.max() > 1.0):
            raise ValueError(f"{name} samples must lie in [0, 1]^d")
    return X, Y


def fit_density(x, cfg):
    h = bandwidth(x.shape[0], cfg.s, cfg.d, cfg.c_h)
    return truncate(fit(x, cfg.kernel, h), cfg.kappa_l, cfg.kappa_u, cfg.eps), h


def plugin_integral(phat, qhat, cfg, values=None):
    pg, qg = values if values is not None else (phat(cfg.grid.nodes), qhat(cfg.grid.nodes))
    return float(integrate_values(pg**cfg.alpha * qg**cfg.beta, cfg.grid))


def t_plugin(X, Y, cfg):
    """``int p_hat^alpha q_hat^beta`` with KDEs fit on the full samples."""
    X, Y = _check_pair(X, Y, cfg)
    if min(X.shape[0], Y.shape[0]) < 2:
        raise ValueError("plug-in estimator needs at least 2 samples per set")
    phat, hp = fit_density(X, cfg)
    qhat, hq = fit_density(Y, cfg)
    val = plugin_integral(phat, qhat, cfg)
    return Estimate(val, "plugin", h=(hp, hq), terms={"plugin": val})


def t_linear(X, Y, cfg, force_plugin_term=False):
    """Plug-in term times ``1 - alpha - beta`` plus first-order corrections.

    KDEs come from the first half of each sample, the correction means from
    the second half. The plug-in term is skipped when its coefficient is
    zero unless ``force_plugin_term`` is set.
    """
    X, Y = _check_pair(X, Y, cfg)
    if min(X.shape[0], Y.shape[0]) < 4:
        raise ValueError("linear estimator needs at least 4 samples per set")
    a, b = cfg.alpha, cfg.beta
    X1, X2 = split_half(X)
    Y1, Y2 = split_half(Y)
    phat, hp = fit_density(X1, cfg)
    qhat, hq = fit_density(Y1, cfg)
    terms = {}
    coef = _snap(c1(a, b))
    if coef != 0.0 or force_plugin_term:
        terms["plugin"] = coef * plugin_integral(phat, qhat, cfg)
    terms["linear_p"] = a * float(np.mean(phat(X2) ** (a - 1.0) * qhat(X2) ** b)) if a != 0 else 0.0
    terms["linear_q"] = b * float(np.mean(phat(Y2) ** a * qhat(Y2) ** (b - 1.0))) if b != 0 else 0.0
    return Estimate(_total(terms), "linear", h=(hp, hq), terms=terms)


def _total(terms):
    val = 0.0
    for v in terms.values():
        val += v
    return val


def t_quadratic(X, Y, cfg, force_plugin_term=False):
    """Second-order corrected estimator with data splitting.

    Adds to the ``c2``-weighted plug-in term the linear corrections with
    weights ``alpha(2-alpha-beta)``, ``beta(2-alpha-beta)``, projection
    estimates of the two quadratic terms and the bilinear cross term.
    """
    X, Y = _check_pair(X, Y, cfg)
    if min(X.shape[0], Y.shape[0]) < 8:
        raise ValueError("quadratic estimator needs at least 8 samples per set")
    a, b = cfg.alpha, cfg.beta
    X1, X2 = split_half(X)
    Y1, Y2 = split_half(Y)
    phat, hp = fit_density(X1, cfg)
    qhat, hq = fit_density(Y1, cfg)
    M = frequency_set(min(X2.shape[0], Y2.shape[0]), cfg.s_prime, cfg.d, cfg.c_m, cfg.lattice_mode)
    pX, qX = phat(X2), qhat(X2)
    pY, qY = phat(Y2), qhat(Y2)
    grid_vals = None

    def on_grid():
        nonlocal grid_vals
        if grid_vals is None:
            grid_vals = phat(cfg.grid.nodes), qhat(cfg.grid.nodes)
        return grid_vals

    terms, residue = {}, 0.0
    coef = _snap(c2(a, b))
    if coef != 0.0 or force_plugin_term:
        terms["plugin"] = coef * plugin_integral(phat, qhat, cfg, on_grid())
    lin = 2.0 - a - b
    terms["linear_p"] = a * lin * float(np.mean(pX ** (a - 1.0) * qX**b)) if a * lin != 0 else 0.0
    terms["linear_q"] = b * lin * float(np.mean(pY**a * qY ** (b - 1.0))) if b * lin != 0 else 0.0

    qp = 0.5 * a * (a - 1.0)
    terms["quadratic_p"] = 0.0
    if qp != 0:
        pg, qg = on_grid()
        bm = b_matrix(qp * pg ** (a - 2.0) * qg**b, M, cfg.grid)
        terms["quadratic_p"], r = quadratic_functional(X2, qp * pX ** (a - 2.0) * qX**b, M, bm, return_residue=True)
        residue = max(residue, r)
    qq = 0.5 * b * (b - 1.0)
    terms["quadratic_q"] = 0.0
    if qq != 0:
        pg, qg = on_grid()
        bm = b_matrix(qq * pg**a * qg ** (b - 2.0), M, cfg.grid)
        terms["quadratic_q"], r = quadratic_functional(Y2, qq * pY**a * qY ** (b - 2.0), M, bm, return_residue=True)
        residue = max(residue, r)
    terms["bilinear"] = 0.0
    if a * b != 0:
        terms["bilinear"], r = bilinear_functional(
            X2, Y2, a * b * pY ** (a - 1.0) * qY ** (b - 1.0), M, return_residue=True
        )
        residue = max(residue, r)
    return Estimate(_total(terms), "quadratic", h=(hp, hq), m=M.size, residue=residue, terms=terms)


_T_ESTIMATORS = {"plugin": t_plugin, "linear": t_linear, "quadratic": t_quadratic}


def estimate_T(X, Y, cfg):
    """Estimate ``int p^alpha q^beta`` with ``cfg.estimator``."""
    return _T_ESTIMATORS[cfg.estimator](X, Y, cfg)


def _divergence(kind, X, Y, alpha, cfg):
    if alpha == 1:
        raise ValueError(f"{kind} divergence is undefined at alpha = 1")
    inner = estimate_T(X, Y, replace(cfg, alpha=alpha, beta=1.0 - alpha))
    if kind == "renyi" and not inner.value > 0:
        raise ValueError(f"Renyi estimate undefined: inner {inner.estimator} estimate of T is {inner.value:.6g} <= 0")
    value = divergence_from_T(kind, inner.value, alpha)
    return Estimate(value, f"{kind}:{inner.estimator}", inner.h, inner.m, inner.residue, {"T": inner.value, **inner.terms})


def renyi(X, Y, alpha, cfg):
    """``log(T_hat) / (alpha - 1)`` with ``beta = 1 - alpha``."""
    return _divergence("renyi", X, Y, alpha, cfg)


def tsallis(X, Y, alpha, cfg):
    """``(T_hat - 1) / (alpha - 1)`` with ``beta = 1 - alpha``."""
    return _divergence("tsallis", X, Y, alpha, cfg)


def l2_squared(X, Y, cfg):
    """``int (p - q)^2`` from two quadratic projection estimates and one
    bilinear estimate; no density estimate is involved."""
    X, Y = _check_pair(X, Y, cfg)
    if min(X.shape[0], Y.shape[0]) < 2:
        raise ValueError("L2 estimator needs at least 2 samples per set")
    M = frequency_set(min(X.shape[0], Y.shape[0]), cfg.s_prime, cfg.d, cfg.c_m, cfg.lattice_mode)
    ident = BMatrix.analytic_identity(M)
    tp, rp = quadratic_functional(X, 1.0, M, ident, return_residue=True)
    tq, rq = quadratic_functional(Y, 1.0, M, ident, return_residue=True)
    tpq, rpq = bilinear_functional(X, Y, 2.0, M, return_residue=True)
    terms = {"theta_p": tp, "theta_q": tq, "cross_2pq": tpq}
    return Estimate(tp + tq - tpq, "l2", m=M.size, residue=max(rp, rq, rpq), terms=terms)


DIVERGENCE_KINDS = ("T", "renyi", "tsallis", "l2")


def estimate(X, Y, cfg, divergence="T"):
    """Dispatch on the divergence kind; ``T`` returns the raw functional."""
    if divergence == "T":
        return estimate_T(X, Y, cfg)
    if divergence in ("renyi", "tsallis"):
        return _divergence(divergence, X, Y, cfg.alpha, cfg)
    if divergence == "l2":
        return l2_squared(X, Y, cfg)
    raise ValueError(f"unknown divergence {divergence!r}; choose from {DIVERGENCE_KINDS}")
