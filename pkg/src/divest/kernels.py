"""Compactly supported higher-order kernels built from Legendre polynomials."""
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as L
from numpy.polynomial import polynomial as P

from .quadrature import GridSpec

MAX_ORDER = 20


def strict_floor(s):
    """Largest integer strictly smaller than ``s``.

    Differs from ``math.floor`` at integers: ``strict_floor(2) == 1``.
    """
    if s <= 0:
        raise ValueError(f"smoothness must be positive, got {s}")
    return math.ceil(s) - 1


@dataclass(frozen=True, eq=False)
class Kernel1D:
    """Polynomial kernel on (-1, 1), zero elsewhere.

    ``coeffs`` are power-basis coefficients, lowest degree first.
    """

    order: int
    coeffs: np.ndarray

    def __call__(self, u):
        u = np.asarray(u, dtype=np.float64)
        inside = np.abs(u) < 1.0
        return np.where(inside, P.polyval(u, self.coeffs), 0.0)

    def exact_moment(self, r):
        """Closed-form ``int u^r K(u) du`` by polynomial integration."""
        poly = P.polymul(self.coeffs, [0.0] * r + [1.0])
        anti = P.polyint(poly)
        return float(P.polyval(1.0, anti) - P.polyval(-1.0, anti))


def legendre_kernel(order):
    """Kernel with vanishing moments 1..order.

    ``K(u) = sum_{m<=order} e_m(0) e_m(u)`` on (-1, 1), with ``e_m`` the
    Legendre polynomials normalised on [-1, 1].
    """
    if order < 0:
        raise ValueError(f"kernel order must be nonnegative, got {order}")
    if order > MAX_ORDER:
        raise ValueError(f"kernel order {order} exceeds {MAX_ORDER}; the construction is ill-conditioned")
    leg = np.zeros(order + 1)
    for m in range(order + 1):
        norm2 = (2 * m + 1) / 2.0
        unit = np.zeros(m + 1)
        unit[m] = 1.0
        leg[m] = norm2 * L.legval(0.0, unit)
    coeffs = np.trim_zeros(L.leg2poly(leg), "b")
    return Kernel1D(order, coeffs)


def kernel_for_smoothness(s):
    return legendre_kernel(strict_floor(s))


@dataclass(frozen=True, eq=False)
class KernelD:
    """Product kernel ``K(x) = prod_i K1(x_i)``."""

    base: Kernel1D
    d: int

    @property
    def order(self):
        return self.base.order

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.prod(self.base(x), axis=-1)


def kernel_moment(kernel, r, grid=None):
    """``int u^r K(u) du`` over (-1, 1) by the midpoint rule on ``grid``.

    The grid lives on [0, 1] and is mapped affinely onto (-1, 1).
    """
    if r < 0:
        raise ValueError(f"moment index must be nonnegative, got {r}")
    grid = grid or GridSpec(1, 1 << 18)
    u = 2.0 * grid.axis - 1.0
    return float(2.0 * np.mean(u**r * kernel(u)))
