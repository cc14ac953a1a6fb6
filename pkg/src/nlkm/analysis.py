"""
Equilibria, Turing conditions, and executable checks of the kernel identities.

The symmetry-identity check evaluates its sums pair by pair over the kernel
stencil and the comparison oracle defaults to the direct operator, so both
stay independent of the FFT path they help validate.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from nlkm.grid import GridSpec, check_field
from nlkm.kernel import DiscreteKernel, apply_nonlocal
from nlkm.reaction import ModelParams, f_kinetics, g_kinetics, jacobian

__all__ = [
    "EquilibriumSet",
    "TuringReport",
    "ComparisonResult",
    "equilibria",
    "turing_report",
    "lemma21_identity_residuals",
    "comparison_oracle",
    "coefficient_of_variation",
    "radial_power_spectrum",
    "dominant_wavelength",
    "VERDICTS",
]

VERDICTS = (
    "stable_no_pattern",
    "turing_unstable_printed",
    "turing_unstable_standard",
    "hopf_or_unstable",
)


@dataclass(frozen=True)
class EquilibriumSet:
    bare_soil: tuple[float, float]
    vegetated: tuple[tuple[float, float], ...]
    discriminant: float

    @property
    def all(self) -> tuple[tuple[float, float], ...]:
        return (self.bare_soil,) + self.vegetated


def equilibria(p: ModelParams) -> EquilibriumSet:
    """
    Spatially uniform steady states of the kinetics.

    Besides bare soil ``(0, a)``, the vegetated states are
    ``n = 2 alpha / (a -+ s)``, ``w = (a -+ s) / 2`` with
    ``s = sqrt(a^2 - 4 alpha^2)``, returned in increasing ``n``.  The
    ``a - s`` branch is evaluated as ``4 alpha^2 / (a + s)`` to avoid
    cancellation when ``a >> alpha``.
    """
    a, alpha = p.a, p.alpha
    disc = a * a - 4.0 * alpha * alpha
    bare = (0.0, a)
    if disc < 0:
        return EquilibriumSet(bare, (), disc)
    s = math.sqrt(disc)
    big = a + s
    small = 4.0 * alpha * alpha / big
    if disc == 0:
        return EquilibriumSet(bare, ((2.0 * alpha / a, a / 2.0),), disc)
    low = (2.0 * alpha / big, big / 2.0)
    high = (big / (2.0 * alpha), small / 2.0)
    return EquilibriumSet(bare, (low, high), disc)


@dataclass(frozen=True)
class TuringReport:
    """
    Linear stability of a uniform state under two diffusion coefficients.

    ``printed_conditions`` evaluates the four inequalities with the
    subscripts as typeset in the source (f_w + g_n < 0, f_w g_n - f_n g_w > 0,
    d2 f_w + d1 g_n > 0, (d2 f_w + d1 g_n)^2 > 4 d1 d2 (f_w g_n - f_n g_w)).
    ``standard_conditions`` is the textbook set (tr J < 0, det J > 0,
    d2 f_n + d1 g_w > 0, (d2 f_n + d1 g_w)^2 > 4 d1 d2 det J).  The two are
    kept apart; nonlocal dispersion relations are not covered.
    """

    equilibrium: tuple[float, float]
    jacobian: np.ndarray
    trace: float
    det: float
    printed_conditions: tuple[bool, bool, bool, bool]
    standard_conditions: tuple[bool, bool, bool, bool]
    verdict: str
    notes: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "equilibrium": list(self.equilibrium),
            "jacobian": self.jacobian.tolist(),
            "trace": self.trace,
            "det": self.det,
            "printed_conditions": list(self.printed_conditions),
            "standard_conditions": list(self.standard_conditions),
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def turing_report(p: ModelParams, e: tuple[float, float], tol: float = 1e-10) -> TuringReport:
    """
    Evaluate both Turing condition sets at the uniform state ``e``.

    Raises
    ------
    ValueError
        If ``e`` is not a steady state of the kinetics within ``tol``.
    """
    n, w = float(e[0]), float(e[1])
    rf, rg = f_kinetics(n, w, p), g_kinetics(n, w, p)
    if abs(rf) > tol or abs(rg) > tol:
        raise ValueError(f"({n}, {w}) is not an equilibrium: f={rf:.3e}, g={rg:.3e}")
    J = jacobian(n, w, p)
    (fn, fw), (gn, gw) = J
    d1, d2 = p.d1, p.d2
    trace = fn + gw
    det = fn * gw - fw * gn

    printed_det = fw * gn - fn * gw
    printed_mix = d2 * fw + d1 * gn
    printed = (
        bool(fw + gn < 0),
        bool(printed_det > 0),
        bool(printed_mix > 0),
        bool(printed_mix ** 2 > 4 * d1 * d2 * printed_det),
    )
    mix = d2 * fn + d1 * gw
    standard = (
        bool(trace < 0),
        bool(det > 0),
        bool(mix > 0),
        bool(mix ** 2 > 4 * d1 * d2 * det),
    )

    if not (trace < 0 and det > 0):
        verdict = "hopf_or_unstable"
    elif all(standard):
        verdict = "turing_unstable_standard"
    elif all(printed):
        verdict = "turing_unstable_printed"
    else:
        verdict = "stable_no_pattern"

    notes = []
    if printed != standard:
        notes.append("printed and standard condition sets disagree")
    if d1 > d2 and trace < 0 and det > 0 and not standard[2]:
        notes.append(
            f"d1 > d2 yet d2*f_n + d1*g_w = {mix:.6g} <= 0: no classical Turing "
            "instability of the local system at this state")
    return TuringReport((n, w), J, float(trace), float(det), printed, standard, verdict, tuple(notes))


def _pairs(k: DiscreteKernel):
    # Every ordered pair (x, x + r) inside the domain, grouped by offset.
    kx, ky = k.half_width
    ny, nx = k.grid.shape
    for a, b in zip(*np.nonzero(k.stencil)):
        ry, rx = int(a) - ky, int(b) - kx
        lo_y, hi_y = max(0, -ry), min(ny, ny - ry)
        lo_x, hi_x = max(0, -rx), min(nx, nx - rx)
        yield (float(k.stencil[a, b]),
               (slice(lo_y, hi_y), slice(lo_x, hi_x)),
               (slice(lo_y + ry, hi_y + ry), slice(lo_x + rx, hi_x + rx)))


def lemma21_identity_residuals(phi: DiscreteKernel, v, w) -> tuple[float, float]:
    """
    Discrete symmetry identities for the kernel, summed over cell pairs.

    Returns
    -------
    r1 : float
        ``|sum v(x) phi (w(y) - w(x)) + 1/2 sum (v(y) - v(x)) phi (w(y) - w(x))|``.
    r2 : float
        ``sum v_-(x) phi (v(y) - v(x))`` with ``v_- = max(-v, 0)``; nonnegative
        up to roundoff.

    Both double sums carry the measure ``hx hy`` twice.
    """
    v = check_field(phi.grid, v, "v")
    w = check_field(phi.grid, w, "w")
    vneg = np.maximum(-v, 0.0)
    lhs = rhs = neg = 0.0
    for weight, x, y in _pairs(phi):
        dw = w[y] - w[x]
        dv = v[y] - v[x]
        lhs += weight * np.sum(v[x] * dw)
        rhs += weight * np.sum(dv * dw)
        neg += weight * np.sum(vneg[x] * dv)
    da = phi.grid.cell_area
    return abs(lhs * da + 0.5 * rhs * da), float(neg * da)


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of :func:`comparison_oracle`; truthy when the ordering held."""

    holds: bool
    steps: int
    min_gap: float
    first_violation: tuple[tuple[int, int], int] | None = None

    def __bool__(self) -> bool:
        return self.holds


def comparison_oracle(phi: DiscreteKernel, F: Callable, zeta0, forcing_gap, dt: float, t_end: float,
                      diffusivity: float = 1.0, tol: float = 1e-10,
                      method: str = "direct") -> ComparisonResult:
    """
    Integrate a solution and a strict subsolution and check their ordering.

    Advances ``xi_t = c Gamma xi + F(xi)`` and
    ``zeta_t = c Gamma zeta + F(zeta) - forcing_gap`` by Forward Euler from the
    same data, and reports whether ``zeta <= xi + tol`` at every step.
    ``first_violation`` is ``((i, j), step)`` of the first failing cell.
    """
    grid = phi.grid
    zeta = check_field(grid, zeta0, "zeta0").copy()
    gap = check_field(grid, np.broadcast_to(forcing_gap, grid.shape), "forcing_gap")
    if np.any(gap < 0):
        raise ValueError("forcing_gap must be nonnegative")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    xi = zeta.copy()
    n_steps = max(0, math.ceil(t_end / dt - 1e-12))
    min_gap = 0.0
    for s in range(1, n_steps + 1):
        h = min(dt, t_end - (s - 1) * dt)
        xi = xi + h * (diffusivity * apply_nonlocal(phi, xi, method) + F(xi))
        zeta = zeta + h * (diffusivity * apply_nonlocal(phi, zeta, method) + F(zeta) - gap)
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(zeta))):
            raise FloatingPointError(f"comparison trajectories blew up at step {s}")
        diff = xi - zeta
        min_gap = min(min_gap, float(diff.min()))
        bad = diff < -tol
        if np.any(bad):
            j, i = np.argwhere(bad)[0]
            return ComparisonResult(False, s, min_gap, ((int(i), int(j)), s))
    return ComparisonResult(True, n_steps, min_gap)


def coefficient_of_variation(z) -> float:
    """Standard deviation over mean of a field."""
    z = np.asarray(z, dtype=np.float64)
    mean = float(z.mean())
    if mean == 0:
        return math.inf if float(z.std()) > 0 else 0.0
    return float(z.std() / abs(mean))


def radial_power_spectrum(z, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    Radially averaged power spectrum of the fluctuation ``z - mean(z)``.

    Returns ``(k, power)`` where ``k`` are bin-centre wavenumbers in cycles per
    unit length, with bin width ``1 / max(lx, ly)``.  The zero mode is dropped.
    """
    z = check_field(grid, z, "z")
    spec = np.abs(np.fft.fft2(z - z.mean())) ** 2
    kx = np.fft.fftfreq(grid.nx, d=grid.hx)
    ky = np.fft.fftfreq(grid.ny, d=grid.hy)
    kr = np.hypot(ky[:, None], kx[None, :])
    dk = 1.0 / max(grid.lx, grid.ly)
    bins = np.rint(kr / dk).astype(int)
    counts = np.bincount(bins.ravel())
    power = np.bincount(bins.ravel(), weights=spec.ravel())
    keep = counts > 0
    keep[0] = False
    idx = np.nonzero(keep)[0]
    return idx * dk, power[idx] / counts[idx]


def dominant_wavelength(z, grid: GridSpec) -> float:
    """Wavelength ``1 / k`` at the peak of the radial power spectrum; ``inf`` if flat."""
    k, power = radial_power_spectrum(z, grid)
    if power.size == 0 or not np.any(power > 0):
        return math.inf
    return float(1.0 / k[int(np.argmax(power))])
