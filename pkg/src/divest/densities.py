"""Trigonometric test densities on the unit cube, samplers and oracle functionals."""
import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import GridSpec, default_grid, integrate

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class TrigTerm:
    amplitude: float
    freq: tuple
    phase: tuple

    def __post_init__(self):
        if len(self.freq) != len(self.phase):
            raise ValueError("freq and phase must have the same length")
        if any(int(f) != f or f < 0 for f in self.freq) or not any(self.freq):
            raise ValueError(f"frequencies must be nonnegative integers, not all zero: {self.freq}")
        for f, ph in zip(self.freq, self.phase):
            if ph not in (0.0, HALF_PI):
                raise ValueError(f"phase must be 0 or pi/2, got {ph}")
            if f == 0 and ph != 0.0:
                raise ValueError("a zero frequency needs phase 0")


@dataclass(frozen=True, eq=False)
class TrigDensity:
    """``1 + sum_j a_j prod_i cos(2 pi f_ji x_i + phase_ji)`` on [0, 1]^d.

    ``upper`` is the analytic envelope ``1 + sum |a_j|``. ``lower`` is a
    certified bound: the grid-scan minimum less the Lipschitz constant times
    the largest distance to a node, but never below ``1 - sum |a_j|``. It
    must be positive.
    """

    d: int
    terms: tuple = ()
    lower: float = field(init=False)
    upper: float = field(init=False)

    def __post_init__(self):
        terms = tuple(t if isinstance(t, TrigTerm) else TrigTerm(float(t[0]), tuple(t[1]), tuple(float(p) for p in t[2]))
                      for t in self.terms)
        for t in terms:
            if len(t.freq) != self.d:
                raise ValueError(f"term {t} does not match dimension {self.d}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "upper", 1.0 + sum(abs(t.amplitude) for t in terms))
        if not terms:
            object.__setattr__(self, "lower", 1.0)
            return
        pts = min(4096, int(round((1 << 20) ** (1.0 / self.d))))
        scan = float(self(GridSpec(self.d, pts).nodes).min())
        lip = sum(2 * math.pi * abs(t.amplitude) * math.hypot(*t.freq) for t in terms)
        lo = max(2.0 - self.upper, scan - lip * math.sqrt(self.d) / (2 * pts))
        if lo <= 0:
            raise ValueError(f"density is not bounded away from zero (grid minimum {scan:.4g})")
        object.__setattr__(self, "lower", lo)

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        out = np.ones(x.shape[0])
        for t in self.terms:
            prod = np.full(x.shape[0], t.amplitude)
            for i, (f, ph) in enumerate(zip(t.freq, t.phase)):
                if f:
                    prod *= np.cos(2 * np.pi * f * x[:, i] + ph)
            out += prod
        return out

    evaluate = __call__

    def same_as(self, other):
        return self.d == other.d and self.terms == other.terms


def uniform(d=1):
    return TrigDensity(d)


def cosine_density(a, d=1, freq=1, axis=0):
    """``1 + a cos(2 pi freq x_axis)``."""
    f = [0] * d
    f[axis] = freq
    return TrigDensity(d, ((a, tuple(f), (0.0,) * d),))


def smooth_density(s, d=1, max_freq=4, scale=0.3, phases=None):
    """Family whose amplitudes decay as ``freq^-(s + 1/2)``.

    Each axis gets its own cosine series, so the density is a sum of
    univariate bumps in every coordinate. ``phases`` is a sequence of 0/1
    flags choosing cos (0) or -sin (1) per frequency.
    """
    terms = []
    phases = phases or [0] * max_freq
    for axis in range(d):
        for f in range(1, max_freq + 1):
            freq = [0] * d
            freq[axis] = f
            ph = [0.0] * d
            ph[axis] = HALF_PI if phases[(f - 1) % len(phases)] else 0.0
            terms.append((scale * f ** -(s + 0.5), tuple(freq), tuple(ph)))
    return TrigDensity(d, tuple(terms))


def sample(density, n, seed, envelope=None, batch=None):
    """Rejection sampling against the uniform proposal.

    ``envelope`` defaults to ``density.upper`` and must dominate the
    density; it is checked against a grid scan.
    """
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    env = density.upper if envelope is None else float(envelope)
    if env is None or not np.isfinite(env):
        raise ValueError("rejection sampling needs a finite upper bound")
    peak = float(density(default_grid(density.d).nodes).max())
    if env < peak:
        raise ValueError(f"envelope {env} is below the density maximum {peak}")
    rng = np.random.default_rng(seed)
    out = np.empty((0, density.d))
    batch = batch or max(64, int(1.2 * n * env))
    while out.shape[0] < n:
        x = rng.random((batch, density.d))
        keep = rng.random(batch) * env < density(x)
        out = np.concatenate([out, x[keep]])
    return out[:n]


def true_T(p, q, alpha, beta, grid=None):
    """Oracle ``int p^alpha q^beta`` by grid quadrature."""
    grid = grid or default_grid(p.d)
    return integrate(lambda x: p(x) ** alpha * q(x) ** beta, grid)


DIVERGENCES = ("l2", "renyi", "tsallis")


def divergence_from_T(kind, t, alpha):
    """Map ``int p^a q^(1-a)`` to the Renyi or Tsallis divergence."""
    if kind == "renyi":
        if not t > 0:
            raise ValueError(f"Renyi divergence needs a positive integral, got {t}")
        return math.log(t) / (alpha - 1.0)
    if kind == "tsallis":
        return (t - 1.0) / (alpha - 1.0)
    raise ValueError(f"unknown divergence {kind!r}")


def true_divergence(p, q, kind, alpha=None, grid=None):
    """Oracle L2^2, Renyi-alpha or Tsallis-alpha divergence."""
    grid = grid or default_grid(p.d)
    if kind == "l2":
        return integrate(lambda x: (p(x) - q(x)) ** 2, grid)
    if alpha is None or alpha == 1:
        raise ValueError(f"{kind} divergence needs alpha != 1")
    return divergence_from_T(kind, true_T(p, q, alpha, 1.0 - alpha, grid), alpha)
