"""
Local spatial operators for the water equation (and local biomass dispersal).

Both operators use the same ghost layer: the boundary cell is copied outward,
which is the cell-centred form of a vanishing normal derivative.
"""

import numpy as np

from nlkm.grid import GridSpec

__all__ = ["laplacian_neumann", "advection_x"]


def _as_field(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2 or min(z.shape) < 3:
        raise ValueError(f"expected a 2D field with at least 3 cells per axis, got shape {z.shape}")
    return z


def laplacian_neumann(z, grid: GridSpec) -> np.ndarray:
    """
    Five-point Laplacian with mirrored ghost cells.

    Parameters
    ----------
    z : array_like, shape (ny, nx)
    grid : GridSpec
        Must have ``hx == hy``.

    Returns
    -------
    ndarray
        ``(z_E + z_W + z_N + z_S - 4 z_C) / h**2``.  Summed over the domain
        the result telescopes to zero.
    """
    if grid.hx != grid.hy:
        raise ValueError(f"laplacian_neumann needs square cells, got hx={grid.hx}, hy={grid.hy}")
    z = _as_field(z)
    if z.shape != grid.shape:
        raise ValueError(f"field shape {z.shape} does not match grid {grid.shape}")
    zp = np.pad(z, 1, mode="edge")
    # Pair each neighbour difference before summing so constants give exact zeros.
    lap = ((zp[1:-1, 2:] - z) + (zp[1:-1, :-2] - z)) + ((zp[2:, 1:-1] - z) + (zp[:-2, 1:-1] - z))
    return lap / (grid.hx * grid.hx)


def advection_x(z, v: float, grid: GridSpec) -> np.ndarray:
    """
    First-order upwind ``v * dz/dx`` for transport toward ``-x``.

    Uses the forward difference ``(z[i+1] - z[i]) / hx``; the last column
    sees its mirrored ghost and so has zero gradient.
    """
    if v < 0:
        raise ValueError(f"downhill speed must be nonnegative, got v={v}")
    z = _as_field(z)
    if z.shape != grid.shape:
        raise ValueError(f"field shape {z.shape} does not match grid {grid.shape}")
    out = np.zeros_like(z)
    if v == 0:
        return out
    out[:, :-1] = z[:, 1:] - z[:, :-1]
    return out * (v / grid.hx)
