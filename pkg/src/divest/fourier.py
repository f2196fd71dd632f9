"""Complex exponential basis on [0, 1]^d and the frequency lattice rule."""
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .kde import as_points


@dataclass(frozen=True)
class FrequencySet:
    """All ``k`` in Z^d with ``max_j |k_j| <= half_width``.

    Members are stored in lexicographic order, so the negation of member
    ``i`` is member ``m - 1 - i``.
    """

    d: int
    half_width: int

    def __post_init__(self):
        if self.d < 1 or self.half_width < 0:
            raise ValueError(f"invalid lattice d={self.d}, half_width={self.half_width}")

    @cached_property
    def members(self):
        r = range(-self.half_width, self.half_width + 1)
        out = np.array(list(itertools.product(r, repeat=self.d)), dtype=np.int64)
        out.flags.writeable = False
        return out

    @property
    def size(self):
        return (2 * self.half_width + 1) ** self.d

    def __len__(self):
        return self.size

    def negation_index(self):
        return np.arange(self.size)[::-1]

    def index_of(self, k):
        k = np.asarray(k)
        if np.any(np.abs(k) > self.half_width):
            raise KeyError(f"{k.tolist()} not in lattice")
        w = 2 * self.half_width + 1
        return int(np.ravel_multi_index(tuple(k + self.half_width), (w,) * self.d))


def lattice_size(n, s_prime, d, c_m=1.0, mode="plain"):
    """Target number of basis elements ``m``.

    ``plain``: ``c_m * n^(2d/(4s'+d))``. ``explicit``: the explicit
    constant from the variance bound of the projection estimator, times ``c_m``.
    """
    if n < 2 or s_prime <= 0 or c_m <= 0:
        raise ValueError("need n >= 2 and positive s_prime, c_m")
    if mode == "plain":
        return c_m * n ** (2.0 * d / (4.0 * s_prime + d))
    if mode == "explicit":
        base = 18.0 * (d / s_prime) * 2.0 ** (4.0 * s_prime / d) * float(n) ** -2
        return c_m * base ** (-d / (4.0 * s_prime + d))
    raise ValueError(f"unknown lattice mode {mode!r}")


def frequency_set(n, s_prime, d, c_m=1.0, mode="plain"):
    m = lattice_size(n, s_prime, d, c_m, mode)
    w = max(0, int(round((m ** (1.0 / d) - 1.0) / 2.0)))
    return FrequencySet(d, w)


def phi(k, x):
    """``exp(2 pi i <k, x>)`` for a single frequency ``k`` and point(s) ``x``."""
    k = np.atleast_1d(np.asarray(k, dtype=np.float64))
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != k.shape[0]:
        raise ValueError("frequency and point dimensions differ")
    return np.exp(2j * np.pi * (x @ k))


def basis_table(x, M):
    """(n, |M|) table of ``phi_k(x_i)``.

    Built from per-axis factors so that the column of ``-k`` is the exact
    complex conjugate of the column of ``k``.
    """
    x = as_points(x, M.d)
    w = M.half_width
    t = np.arange(1, w + 1)
    table = None
    for j in range(M.d):
        ang = 2.0 * np.pi * x[:, j, None] * t
        pos = np.cos(ang) + 1j * np.sin(ang)
        axis = np.concatenate([np.conj(pos[:, ::-1]), np.ones((x.shape[0], 1)), pos], axis=1)
        table = axis if table is None else (table[:, :, None] * axis[:, None, :]).reshape(x.shape[0], -1)
    return table


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    M: FrequencySet
    values: np.ndarray

    def __getitem__(self, k):
        return self.values[self.M.index_of(k)]

    def reconstruct(self, x):
        """``sum_k a_k phi_k(x)`` (real part)."""
        return (basis_table(x, self.M) @ self.values).real


def empirical_coefficients(samples, M):
    """``a_k = mean_i conj(phi_k(X_i))``, so ``f ~ sum_k a_k phi_k``."""
    samples = as_points(samples, M.d)
    if samples.shape[0] == 0:
        raise ValueError("empirical coefficients need a nonempty sample")
    return CoefficientVector(M, np.conj(basis_table(samples, M)).mean(axis=0))
