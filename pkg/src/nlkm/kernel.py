"""
Discrete dispersal kernels and the nonlocal operator

    (Gamma z)(x) = sum_{y in Omega} phi(x, y) (z(y) - z(x)) hx hy

for a translation-invariant kernel ``phi(x, y) = G(y - x)`` clipped to the
domain.  No ghost cells are involved: offsets that leave the domain are simply
dropped, so cells near the boundary see less kernel mass ``m(x)``.

Two evaluation paths are provided.  :func:`apply_nonlocal_direct` is the plain
double sum and serves as the reference; :func:`apply_nonlocal_fft` computes
the same quadrature with a zero-padded real FFT convolution.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from nlkm.grid import GridSpec, check_field

__all__ = [
    "KernelSpec",
    "DiscreteKernel",
    "build_kernel",
    "gaussian_density",
    "apply_nonlocal",
    "apply_nonlocal_direct",
    "apply_nonlocal_fft",
    "integral_of_gamma",
    "fft_workers",
]


def fft_workers() -> int | None:
    """Worker cap for the FFT path, read from ``NLKM_THREADS``."""
    raw = os.environ.get("NLKM_THREADS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"NLKM_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"NLKM_THREADS must be a positive integer, got {raw!r}")
    return value


@dataclass(frozen=True)
class KernelSpec:
    """Truncated isotropic Gaussian with standard deviation ``sigma``."""

    sigma: float = 1.0
    cutoff_radii: float = 4.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.cutoff_radii >= 1:
            raise ValueError(f"cutoff_radii must be >= 1, got {self.cutoff_radii}")

    @property
    def cutoff(self) -> float:
        return self.cutoff_radii * self.sigma


def gaussian_density(r2, sigma: float):
    """Mean-zero 2D Gaussian density at squared distance ``r2``."""
    return np.exp(-np.asarray(r2) / (2.0 * sigma * sigma)) / (2.0 * math.pi * sigma * sigma)


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
    """
    Quadrature weights of a symmetric nonnegative kernel on a grid.

    Attributes
    ----------
    grid : GridSpec
    stencil : ndarray, shape (2*Ky + 1, 2*Kx + 1)
        ``stencil[Ky + ry, Kx + rx]`` is the weight (density times cell area)
        coupling a cell to the cell offset by ``(rx, ry)``.
    boundary_mass : ndarray, shape (ny, nx)
        ``m(x)``, the stencil mass whose offsets land inside the domain.
    lambda_disc : float
        ``max m(x)``; bounds the operator norm by ``2 * lambda_disc``.
    """

    grid: GridSpec
    stencil: np.ndarray
    boundary_mass: np.ndarray
    lambda_disc: float
    _fft_shape: tuple = field(repr=False, compare=False)
    _spectrum: np.ndarray = field(repr=False, compare=False)

    @property
    def half_width(self) -> tuple[int, int]:
        """``(Kx, Ky)``: stencil reach in cells along each axis."""
        ky, kx = self.stencil.shape
        return (kx - 1) // 2, (ky - 1) // 2

    @classmethod
    def from_stencil(cls, grid: GridSpec, stencil) -> "DiscreteKernel":
        """
        Wrap an explicit weight stencil.

        The stencil must have odd side lengths, nonnegative entries, and be
        an even function of the offset (``stencil == stencil[::-1, ::-1]``).
        Reach beyond the grid is trimmed since it can never couple two cells.
        """
        stencil = np.array(stencil, dtype=np.float64)
        if stencil.ndim != 2 or stencil.shape[0] % 2 == 0 or stencil.shape[1] % 2 == 0:
            raise ValueError(f"stencil must be 2D with odd side lengths, got shape {stencil.shape}")
        if not np.all(np.isfinite(stencil)) or np.any(stencil < 0):
            raise ValueError("stencil weights must be finite and nonnegative")
        if not np.array_equal(stencil, stencil[::-1, ::-1]):
            raise ValueError("stencil must be symmetric under offset reversal")

        ky, kx = (stencil.shape[0] - 1) // 2, (stencil.shape[1] - 1) // 2
        tx, ty = min(kx, grid.nx - 1), min(ky, grid.ny - 1)
        stencil = stencil[ky - ty: ky + ty + 1, kx - tx: kx + tx + 1].copy()
        stencil.flags.writeable = False

        mass = _boundary_mass(grid, stencil)
        mass.flags.writeable = False

        shape = (sfft.next_fast_len(grid.ny + ty, real=True),
                 sfft.next_fast_len(grid.nx + tx, real=True))
        wrapped = np.zeros(shape)
        rows = np.arange(-ty, ty + 1) % shape[0]
        cols = np.arange(-tx, tx + 1) % shape[1]
        wrapped[np.ix_(rows, cols)] = stencil
        spectrum = sfft.rfft2(wrapped)
        spectrum.flags.writeable = False

        return cls(grid, stencil, mass, float(mass.max()), shape, spectrum)


def _boundary_mass(grid: GridSpec, stencil: np.ndarray) -> np.ndarray:
    # Rectangle sums over a summed-area table of the stencil: cell (i, j)
    # keeps offsets rx in [-i, nx-1-i], ry in [-j, ny-1-j].
    ky, kx = (stencil.shape[0] - 1) // 2, (stencil.shape[1] - 1) // 2
    table = np.zeros((stencil.shape[0] + 1, stencil.shape[1] + 1))
    table[1:, 1:] = stencil.cumsum(axis=0).cumsum(axis=1)

    i = np.arange(grid.nx)
    j = np.arange(grid.ny)
    c0 = np.maximum(-kx, -i) + kx
    c1 = np.minimum(kx, grid.nx - 1 - i) + kx + 1
    r0 = (np.maximum(-ky, -j) + ky)[:, None]
    r1 = (np.minimum(ky, grid.ny - 1 - j) + ky + 1)[:, None]
    return table[r1, c1] - table[r0, c1] - table[r1, c0] + table[r0, c0]


def build_kernel(grid: GridSpec, spec: KernelSpec) -> DiscreteKernel:
    """
    Midpoint-rule Gaussian kernel on ``grid``.

    Weights are ``G_sigma(r h) * hx * hy`` for every integer offset whose
    centre-to-centre distance is within ``spec.cutoff``, zero elsewhere.
    Kernel mass that falls outside the domain is dropped, not renormalised.

    Raises
    ------
    ValueError
        If the cutoff radius exceeds the shorter domain side.
    """
    cutoff = spec.cutoff
    if cutoff > min(grid.lx, grid.ly):
        raise ValueError(
            f"kernel cutoff {cutoff} exceeds the domain (min side {min(grid.lx, grid.ly)})")
    kx = min(math.ceil(cutoff / grid.hx), grid.nx - 1)
    ky = min(math.ceil(cutoff / grid.hy), grid.ny - 1)
    ox = np.arange(-kx, kx + 1) * grid.hx
    oy = np.arange(-ky, ky + 1) * grid.hy
    r2 = oy[:, None] ** 2 + ox[None, :] ** 2
    weights = gaussian_density(r2, spec.sigma) * grid.cell_area
    weights[r2 > cutoff * cutoff] = 0.0
    return DiscreteKernel.from_stencil(grid, weights)


def _offsets(k: DiscreteKernel):
    kx, ky = k.half_width
    for a, b in zip(*np.nonzero(k.stencil)):
        ry, rx = int(a) - ky, int(b) - kx
        if rx == 0 and ry == 0:
            continue
        yield rx, ry, float(k.stencil[a, b])


def _overlap(n: int, r: int) -> tuple[slice, slice]:
    # Target cells t with t + r inside [0, n), and the matching source cells.
    lo, hi = max(0, -r), min(n, n - r)
    return slice(lo, hi), slice(lo + r, hi + r)


def apply_nonlocal_direct(k: DiscreteKernel, z) -> np.ndarray:
    """
    Reference double sum ``sum_r w_r (z(x + r) - z(x))`` over in-domain offsets.

    Offsets are visited in a fixed order, so the result is reproducible
    bit for bit.  Constant fields map to exactly zero.
    """
    z = check_field(k.grid, z, "z")
    ny, nx = z.shape
    out = np.zeros_like(z)
    for rx, ry, weight in _offsets(k):
        ty, sy = _overlap(ny, ry)
        tx, sx = _overlap(nx, rx)
        out[ty, tx] += weight * (z[sy, sx] - z[ty, tx])
    return out


def apply_nonlocal_fft(k: DiscreteKernel, z, workers: int | None = None) -> np.ndarray:
    """
    Nonlocal operator via zero-padded FFT convolution, minus ``z * m``.

    The operator ignores additive constants, so the transform is taken of
    ``z - z[0, 0]``: constants then map to exact zeros, as on the direct
    path, and the roundoff scales with the spread of ``z`` rather than its
    size.
    """
    z = check_field(k.grid, z, "z")
    if workers is None:
        workers = fft_workers()
    ny, nx = z.shape
    shape = k._fft_shape
    z = z - z[0, 0]
    spectrum = sfft.rfft2(z, s=shape, workers=workers)
    spectrum *= k._spectrum
    conv = sfft.irfft2(spectrum, s=shape, workers=workers)[:ny, :nx]
    return conv - z * k.boundary_mass


def apply_nonlocal(k: DiscreteKernel, z, method: str = "fft") -> np.ndarray:
    if method == "fft":
        return apply_nonlocal_fft(k, z)
    if method == "direct":
        return apply_nonlocal_direct(k, z)
    raise ValueError(f"unknown method {method!r}; expected 'fft' or 'direct'")


def integral_of_gamma(k: DiscreteKernel, z, method: str = "direct") -> float:
    """Midpoint integral of ``Gamma z`` over the domain; zero up to roundoff."""
    return float(np.sum(apply_nonlocal(k, z, method)) * k.grid.cell_area)
