"""Small numerical helpers: uniform grids, multilinear interpolation, quadrature."""

from __future__ import annotations

import numpy as np

__all__ = ["clamp01", "uniform_grid", "trilinear", "gauss_hermite_normal"]


def clamp01(x):
    """Clamp scalar or array to [0, 1]."""
    return np.clip(x, 0.0, 1.0)


def uniform_grid(n: int) -> np.ndarray:
    """n equally spaced nodes spanning [0, 1] inclusive."""
    if n < 2:
        raise ValueError(f"grid needs at least 2 nodes, got {n}")
    return np.linspace(0.0, 1.0, n)


def trilinear(table: np.ndarray, x, y, z) -> np.ndarray:
    """Multilinear interpolation of ``table`` on the unit cube.

    ``table`` has shape (nx, ny, nz) with each axis sampled on
    ``uniform_grid``. Query coordinates are broadcast against each other and
    clipped to [0, 1] before lookup.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    x, y, z = np.broadcast_arrays(x, y, z)

    ix, fx = _locate(x, table.shape[0])
    iy, fy = _locate(y, table.shape[1])
    iz, fz = _locate(z, table.shape[2])

    out = np.zeros(x.shape, dtype=float)
    for dx, wx in ((0, 1.0 - fx), (1, fx)):
        for dy, wy in ((0, 1.0 - fy), (1, fy)):
            for dz, wz in ((0, 1.0 - fz), (1, fz)):
                out += wx * wy * wz * table[ix + dx, iy + dy, iz + dz]
    return out


def _locate(coord: np.ndarray, n: int):
    """Cell index and fractional offset of each coordinate on uniform_grid(n)."""
    pos = np.clip(coord, 0.0, 1.0) * (n - 1)
    idx = np.minimum(pos.astype(np.int64), n - 2)
    return idx, pos - idx


def gauss_hermite_normal(sigma: float, n_nodes: int):
    """Nodes and weights integrating E[f(Z)] for Z ~ N(0, sigma^2).

    sigma == 0 (or a single node) collapses to the exact point mass at zero so
    that noiseless expectations reproduce deterministic evaluation bit for bit.
    Weights are normalized to sum to one.
    """
    if n_nodes < 1:
        raise ValueError("need at least one quadrature node")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0 or n_nodes == 1:
        return np.array([0.0]), np.array([1.0])
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    return np.sqrt(2.0) * sigma * nodes, weights / weights.sum()
