"""Sample-mean, bilinear and quadratic projection estimators of functionals.

Throughout, a pairing written ``phi_k(X_i) phi_k(X_j)`` for a generic real
orthonormal basis is evaluated with complex exponentials as
``conj(phi_k(X_i)) phi_k(X_j)``, and ``b[k, k'] = int phi_k phi_k' psi``
is paired with ``conj(phi_k(X_i)) conj(phi_k'(X_j))``. For ``psi = 1`` that
makes ``b`` the indicator of ``k + k' = 0`` and the correction collapses to
the diagonal.
"""
from dataclasses import dataclass

import numpy as np

from .fourier import basis_table
from .kde import as_points
from .quadrature import GridSpec, default_grid

RESIDUE_RTOL = 1e-8


class ImaginaryResidueError(ArithmeticError):
    """A functional that must be real came out with a non-negligible imaginary part."""


def real_part(z, what="estimate"):
    z = complex(z)
    if abs(z.imag) > RESIDUE_RTOL * (1.0 + abs(z.real)):
        raise ImaginaryResidueError(f"{what} has imaginary residue {z.imag:.3g} (real part {z.real:.6g})")
    return z.real, abs(z.imag)


class PsiFunction:
    """A known weight function on the cube, with an optional sup-norm bound."""

    def __init__(self, func, bound=None):
        self.func = func
        self.bound = bound

    @classmethod
    def constant(cls, c):
        c = float(c)
        return cls(lambda x: np.full(np.shape(x)[0], c), abs(c))

    def __call__(self, x):
        x = np.atleast_2d(x)
        return np.broadcast_to(np.asarray(self.func(x), dtype=np.float64), (x.shape[0],))

    def check_bound(self, grid):
        """Spot check ``|psi| <= bound`` on the grid nodes."""
        if self.bound is None:
            return True
        return bool(np.all(np.abs(self(grid.nodes)) <= self.bound * (1 + 1e-12)))


def _values(psi, x):
    return psi(x) if callable(psi) else np.broadcast_to(np.asarray(psi, dtype=np.float64), (x.shape[0],))


def linear_functional(samples, psi):
    """Sample mean of ``psi`` over the samples."""
    samples = as_points(samples)
    if samples.shape[0] == 0:
        raise ValueError("linear functional needs a nonempty sample")
    return float(np.mean(_values(psi, samples)))


def bilinear_functional(samples_f, samples_g, psi, M, return_residue=False):
    """Projection estimate of ``int psi f g`` from X ~ f and Y ~ g.

    ``(1/n_g) sum_j sum_k a_k phi_k(Y_j) psi(Y_j)`` with ``a`` the empirical
    coefficients of the X sample. ``psi`` may be a callable or the array of
    its values at ``samples_g``.
    """
    x = as_points(samples_f, M.d)
    y = as_points(samples_g, M.d)
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise ValueError("bilinear functional needs nonempty samples")
    coef = np.conj(basis_table(x, M)).mean(axis=0)
    weighted = basis_table(y, M).T @ _values(psi, y)
    val, res = real_part(coef @ weighted / y.shape[0], "bilinear functional")
    return (val, res) if return_residue else val


@dataclass(frozen=True, eq=False)
class BMatrix:
    """``b[k, k'] = int phi_k phi_k' psi`` over a frequency set."""

    M: object
    values: np.ndarray
    grid: GridSpec = None

    @classmethod
    def analytic_identity(cls, M):
        """``b`` for ``psi = 1``: the indicator of ``k + k' = 0``."""
        vals = np.zeros((M.size, M.size), dtype=np.complex128)
        vals[np.arange(M.size), M.negation_index()] = 1.0
        return cls(M, vals)


def _fourier_sums(values, grid, w):
    # F[j] = mean_x values(x) exp(2 pi i <j, x>) for all |j_i| <= 2w, one axis at a time
    t = np.arange(-2 * w, 2 * w + 1)
    e = np.exp(2j * np.pi * np.outer(grid.axis, t))
    arr = np.asarray(values, dtype=np.complex128).reshape((grid.points_per_axis,) * grid.d)
    for _ in range(grid.d):
        arr = np.tensordot(arr, e, axes=([0], [0]))
    return arr / grid.n_nodes


def b_matrix(psi, M, grid=None):
    """Quadrature values of ``int phi_k phi_k' psi`` for all pairs in ``M``.

    ``psi`` may be a callable or its values at ``grid.nodes``. The grid
    needs at least ``8 (2w + 1)`` points per axis.
    """
    grid = grid or default_grid(M.d)
    if grid.d != M.d:
        raise ValueError("grid and frequency set differ in dimension")
    w = M.half_width
    if grid.points_per_axis < 8 * (2 * w + 1):
        raise ValueError(
            f"grid with {grid.points_per_axis} points per axis cannot resolve half width {w}; "
            f"need at least {8 * (2 * w + 1)}"
        )
    vals = psi(grid.nodes) if callable(psi) else np.asarray(psi)
    if not np.all(np.isfinite(vals)):
        raise ValueError("psi is not finite on the grid")
    sums = _fourier_sums(vals, grid, w)
    # k + k' indexes into sums, offset by 2w per axis
    idx = M.members[:, None, :] + M.members[None, :, :] + 2 * w
    return BMatrix(M, sums[tuple(idx[..., a] for a in range(M.d))], grid)


def quadratic_functional(samples, psi, M, b, return_residue=False):
    """U-statistic projection estimate of ``int psi f^2`` (ordered pairs i != j).

    ``2/(n(n-1)) sum_k sum_{i!=j} conj(phi_k(X_i)) phi_k(X_j) psi(X_j)
    - 1/(n(n-1)) sum_{k,k'} sum_{i!=j} conj(phi_k(X_i) phi_k'(X_j)) b[k,k']``,
    contracted in O(n |M|^2) by removing the diagonal from full sums.
    """
    x = as_points(samples, M.d)
    n = x.shape[0]
    if n < 2:
        raise ValueError(f"quadratic functional needs n >= 2, got {n}")
    B = b.values if isinstance(b, BMatrix) else np.asarray(b)
    table = basis_table(x, M)
    ctab = np.conj(table)
    psi_x = _values(psi, x)
    s = ctab.sum(axis=0)
    first = s @ (table.T @ psi_x) - np.sum((ctab * table).sum(axis=1) * psi_x)
    second = s @ B @ s - np.sum((ctab @ B) * ctab)
    z = (2.0 * first - second) / (n * (n - 1.0))
    val, res = real_part(z, "quadratic functional")
    return (val, res) if return_residue else val
