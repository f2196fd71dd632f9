"""Midpoint tensor-grid integration over the unit cube."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_POINTS = {1: 2048, 2: 256, 3: 64}
MAX_NODES = 10**8


@dataclass(frozen=True)
class GridSpec:
    """Midpoint grid with ``points_per_axis`` cells along each of ``d`` axes.

    Grids with more than ``MAX_NODES`` nodes are refused unless
    ``allow_large`` is set.
    """

    d: int
    points_per_axis: int
    allow_large: bool = False

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if self.points_per_axis < 1:
            raise ValueError(f"points_per_axis must be positive, got {self.points_per_axis}")
        if self.n_nodes > MAX_NODES and not self.allow_large:
            raise ValueError(
                f"grid has {self.n_nodes} nodes (> {MAX_NODES}); pass allow_large=True to override"
            )

    @property
    def n_nodes(self):
        return self.points_per_axis**self.d

    @cached_property
    def axis(self):
        """1D node coordinates, shared by every axis."""
        k = self.points_per_axis
        return (np.arange(k) + 0.5) / k

    @cached_property
    def nodes(self):
        """(N, d) array of nodes in C order (last axis varies fastest)."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        out = np.stack([m.ravel() for m in mesh], axis=1)
        out.flags.writeable = False
        return out


def default_grid(d, allow_large=False):
    """Default resolution for dimension ``d`` (2048, 256, 64 for d = 1, 2, 3)."""
    if d in DEFAULT_POINTS:
        return GridSpec(d, DEFAULT_POINTS[d])
    if not allow_large:
        raise ValueError(f"no default grid for d={d}; grid integration beyond d=3 must be requested explicitly")
    return GridSpec(d, 16, allow_large=True)


def _check_finite(values, grid):
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"integrand not finite at node {i} (x={grid.nodes[i].tolist()}): {values[i]}")


def evaluate_on_grid(f, grid):
    values = np.asarray(f(grid.nodes))
    if values.shape != (grid.n_nodes,):
        values = np.broadcast_to(values, (grid.n_nodes,))
    return values


def integrate(f, grid):
    """Midpoint-rule integral of a vectorised ``f`` taking an (N, d) array.

    Raises ``ValueError`` naming the first node where ``f`` is not finite.
    """
    values = evaluate_on_grid(f, grid).astype(np.float64, copy=False)
    _check_finite(values, grid)
    return float(values.mean())


def integrate_values(values, grid):
    """Same rule applied to precomputed node values."""
    values = np.asarray(values)
    _check_finite(values, grid)
    return values.mean()


def integrate_complex(f, grid):
    values = evaluate_on_grid(f, grid).astype(np.complex128, copy=False)
    _check_finite(values, grid)
    return complex(values.mean())
