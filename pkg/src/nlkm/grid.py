"""
Cell-centred rectangular grids.

A field on a grid is a float64 array of shape ``(ny, nx)``: row ``j`` holds
the cells at height ``y_j`` and ``x`` varies fastest, so the flat index of
cell ``(i, j)`` is ``j * nx + i``.  Boundary conditions are homogeneous
Neumann everywhere; the operators in :mod:`nlkm.localop` realise them by
mirroring the boundary cell into the ghost layer.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["GridSpec", "make_grid", "eval_initial_conditions", "linf_norm", "check_field"]


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centred discretisation of ``[0, lx] x [0, ly]``."""

    lx: float
    ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError(f"domain extents must be positive, got lx={self.lx}, ly={self.ly}")
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise ValueError("cell counts must be integers")
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"need at least 3 cells per axis, got nx={self.nx}, ny={self.ny}")
        object.__setattr__(self, "lx", float(self.lx))
        object.__setattr__(self, "ly", float(self.ly))
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def x(self) -> np.ndarray:
        """Cell-centre abscissae ``(i + 1/2) * hx``."""
        return (np.arange(self.nx) + 0.5) * self.hx

    @property
    def y(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.hy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` centre coordinates, each of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def index(self, i: int, j: int) -> int:
        return j * self.nx + i

    def unravel(self, k: int) -> tuple[int, int]:
        j, i = divmod(k, self.nx)
        return i, j

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def full(self, value: float) -> np.ndarray:
        return np.full(self.shape, float(value))


def make_grid(lx: float, ly: float, nx: int, ny: int) -> GridSpec:
    """Build a grid, rejecting non-positive extents and fewer than 3 cells per axis."""
    return GridSpec(lx, ly, nx, ny)


def check_field(grid: GridSpec, z, name: str = "field") -> np.ndarray:
    """Coerce ``z`` to a float64 array and verify it lives on ``grid``."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != grid.shape:
        raise ValueError(f"{name} has shape {z.shape}, grid expects {grid.shape}")
    return z


def eval_initial_conditions(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    Evaluate the standard pattern-formation initial data at cell centres.

    Returns
    -------
    n0, w0 : ndarray
        ``n0 = 1.5 + 0.5 sin(y) cos(x)`` (biomass) and
        ``w0 = 2 pi + pi sin(x) sin(y) + cos(pi y)`` (water).
    """
    X, Y = grid.mesh()
    n0 = 1.5 + 0.5 * np.sin(Y) * np.cos(X)
    w0 = 2.0 * np.pi + np.pi * np.sin(X) * np.sin(Y) + np.cos(np.pi * Y)
    n0.flags.writeable = False
    w0.flags.writeable = False
    return n0, w0


def linf_norm(f) -> float:
    f = np.asarray(f)
    if f.size == 0:
        return 0.0
    return float(np.max(np.abs(f)))
