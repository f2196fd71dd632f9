"""Estimators of two-density integral functionals and divergences on [0, 1]^d."""
from ._backend import BACKEND
from .densities import (
    TrigDensity,
    cosine_density,
    sample,
    smooth_density,
    true_divergence,
    true_T,
    uniform,
)
from .estimators import (
    Estimate,
    EstimatorConfig,
    c1,
    c2,
    estimate,
    estimate_T,
    l2_squared,
    renyi,
    t_linear,
    t_plugin,
    t_quadratic,
    tsallis,
)
from .quadrature import GridSpec, default_grid, integrate, integrate_complex

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Estimate", "EstimatorConfig", "GridSpec", "TrigDensity", "c1", "c2", "cosine_density",
    "default_grid", "estimate", "estimate_T", "integrate", "integrate_complex", "l2_squared", "renyi",
    "sample", "smooth_density", "t_linear", "t_plugin", "t_quadratic", "true_T", "true_divergence",
    "tsallis", "uniform",
]
