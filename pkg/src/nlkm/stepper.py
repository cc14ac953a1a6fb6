"""
Forward Euler integration of the local and nonlocal Klausmeier systems.

Nonlocal mode advances

    n' = n + dt (d1 Gamma n + f(n, w))
    w' = w + dt (d2 Lap w + v dw/dx + g(n, w))

and local mode replaces ``Gamma n`` with the Neumann Laplacian of ``n``.
Every accepted step is checked for nonnegativity and for the sup bound
``max w <= max(max w0, a)``; a violation raises :class:`InvariantViolation`.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from nlkm.grid import GridSpec, check_field, linf_norm
from nlkm.kernel import DiscreteKernel, apply_nonlocal
from nlkm.localop import advection_x, laplacian_neumann
from nlkm.reaction import ModelParams, f_kinetics, g_kinetics

__all__ = [
    "SimState",
    "StepControl",
    "Diagnostics",
    "InvariantViolation",
    "RunTrace",
    "initial_state",
    "stability_limits",
    "stability_limit",
    "resolve_dt",
    "step",
    "run",
    "diagnostics",
    "NEG_TOL",
    "BOUND_TOL",
]

# Undershoots down to -NEG_TOL are roundoff and get clamped; anything lower aborts.
NEG_TOL = 1e-12
BOUND_TOL = 1e-9


class InvariantViolation(RuntimeError):
    """A step produced a state outside the admissible set."""

    def __init__(self, step_index: int, invariant: str, detail: str):
        self.step_index = step_index
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"step {step_index}: {invariant} violated ({detail})")


@dataclass(frozen=True, eq=False)
class SimState:
    """
    Snapshot of the system at time ``t``.

    ``w_cap`` is ``max(max|w0|, a)`` for the run this state belongs to and
    ``clamped`` counts roundoff-level negative entries reset to zero so far.
    """

    t: float
    n: np.ndarray
    w: np.ndarray
    step_index: int = 0
    w_cap: float = math.inf
    clamped: int = 0


@dataclass(frozen=True)
class StepControl:
    t_end: float = 200.0
    dt: Optional[float] = None
    safety: float = 0.9
    snapshot_stride: int = 1000

    def __post_init__(self):
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0 < self.safety <= 1:
            raise ValueError(f"safety must lie in (0, 1], got {self.safety}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be a positive integer, got {self.snapshot_stride}")


@dataclass(frozen=True)
class Diagnostics:
    step_index: int
    t: float
    n_max: float
    w_max: float
    n_min: float
    w_min: float
    mass: float
    clamped: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RunTrace:
    """Snapshot sink that keeps the diagnostics and, optionally, the fields."""

    keep_fields: bool = False
    records: list = field(default_factory=list)
    fields: list = field(default_factory=list)

    def __call__(self, step_index, t, n, w, diag):
        self.records.append(diag)
        if self.keep_fields:
            self.fields.append((step_index, t, n, w))


def initial_state(n0, w0, params: ModelParams, grid: GridSpec | None = None) -> SimState:
    n0 = np.array(n0, dtype=np.float64)
    w0 = np.array(w0, dtype=np.float64)
    if grid is not None:
        check_field(grid, n0, "n0")
        check_field(grid, w0, "w0")
    if n0.shape != w0.shape:
        raise ValueError(f"n0 and w0 shapes differ: {n0.shape} vs {w0.shape}")
    if np.any(n0 < 0) or np.any(w0 < 0):
        raise ValueError("initial data must be nonnegative")
    if not (np.all(np.isfinite(n0)) and np.all(np.isfinite(w0))):
        raise ValueError("initial data must be finite")
    n0.flags.writeable = False
    w0.flags.writeable = False
    return SimState(0.0, n0, w0, 0, max(linf_norm(w0), params.a), 0)


def diagnostics(state: SimState, grid: GridSpec) -> Diagnostics:
    return Diagnostics(
        step_index=state.step_index,
        t=state.t,
        n_max=float(state.n.max()),
        w_max=float(state.w.max()),
        n_min=float(state.n.min()),
        w_min=float(state.w.min()),
        mass=float(np.sum(state.n + state.w) * grid.cell_area),
        clamped=state.clamped,
    )


def _check_kernel(params: ModelParams, grid: GridSpec, kernel: DiscreteKernel | None):
    if params.mode == "nonlocal":
        if kernel is None:
            raise ValueError("nonlocal mode needs a kernel")
        if kernel.grid != grid:
            raise ValueError("kernel was built for a different grid")
    elif kernel is not None:
        raise ValueError("local mode takes no kernel")


def stability_limits(params: ModelParams, grid: GridSpec, kernel: DiscreteKernel | None = None,
                     n0=None, w0=None) -> dict:
    """
    Explicit step limits of the individual terms.

    Keys: ``water_diffusion`` (h^2 / 4 d2), ``biomass_diffusion`` (local
    mode, h^2 / 4 d1), ``advection`` (h / v), ``nonlocal``
    (1 / (2 d1 lambda_disc)) and, when initial data are given, ``kinetics``
    (1 / (2 r_max)) with ``r_max = max(alpha, 1 + N^2, 2 W N)``, where
    ``W = max(|w0|, a)`` and ``N = max(|n0 + w0|, a / min(alpha, 1))``.

    With initial data there is also ``positivity``: the step at which the
    diagonal coefficient of the combined update of either field reaches
    zero.  Each separate limit can hold while their sum does not (coarse
    grids with fast advection), and then Forward Euler loses positivity.
    Terms that impose no limit are reported as ``inf``.
    """
    _check_kernel(params, grid, kernel)
    h = min(grid.hx, grid.hy)
    limits = {
        "water_diffusion": h * h / (4.0 * params.d2) if params.d2 > 0 else math.inf,
        "advection": h / params.v if params.v > 0 else math.inf,
    }
    if params.mode == "local":
        limits["biomass_diffusion"] = h * h / (4.0 * params.d1)
    else:
        lam = kernel.lambda_disc
        limits["nonlocal"] = 1.0 / (2.0 * params.d1 * lam) if lam > 0 else math.inf
    if n0 is not None and w0 is not None:
        n0 = np.asarray(n0, dtype=np.float64)
        w0 = np.asarray(w0, dtype=np.float64)
        # The early transient drives n far above max n0, so bound n by the
        # pointwise n + w estimate and w by max(|w0|, a) rather than by n0, w0.
        wmax = max(linf_norm(w0), params.a)
        nmax = max(linf_norm(n0 + w0), params.a / min(params.alpha, 1.0))
        rate = max(params.alpha, 1.0 + nmax * nmax, 2.0 * wmax * nmax)
        limits["kinetics"] = 1.0 / (2.0 * rate)
        w_rate = 4.0 * params.d2 / (h * h) + params.v / h + 1.0 + nmax * nmax
        if params.mode == "local":
            n_rate = 4.0 * params.d1 / (h * h) + params.alpha
        else:
            n_rate = params.d1 * kernel.lambda_disc + params.alpha
        limits["positivity"] = 1.0 / max(w_rate, n_rate)
    return limits


def stability_limit(params: ModelParams, grid: GridSpec, kernel: DiscreteKernel | None = None,
                    n0=None, w0=None) -> float:
    return min(stability_limits(params, grid, kernel, n0, w0).values())


def resolve_dt(ctl: StepControl, params: ModelParams, grid: GridSpec,
               kernel: DiscreteKernel | None, state0: SimState) -> float:
    """The step used by :func:`run`: ``ctl.dt`` if set, else ``safety * limit``."""
    limit = stability_limit(params, grid, kernel, state0.n, state0.w)
    if ctl.dt is None:
        return ctl.safety * limit
    if ctl.dt > ctl.safety * limit:
        raise ValueError(
            f"dt={ctl.dt} exceeds safety * stability limit = {ctl.safety * limit}")
    return float(ctl.dt)


def _admit(name: str, z: np.ndarray, step_index: int) -> tuple[np.ndarray, int]:
    if not np.all(np.isfinite(z)):
        raise InvariantViolation(step_index, "finiteness", f"{name} has non-finite entries")
    zmin = float(z.min())
    if zmin >= 0:
        return z, 0
    if zmin < -NEG_TOL:
        k = int(np.argmin(z))
        raise InvariantViolation(step_index, "nonnegativity",
                                 f"min {name} = {zmin:.3e} at flat index {k}")
    neg = z < 0
    z = np.where(neg, 0.0, z)
    return z, int(neg.sum())


def step(state: SimState, params: ModelParams, grid: GridSpec, kernel: DiscreteKernel | None,
         dt: float, method: str = "fft") -> SimState:
    """Advance one Forward Euler step of length ``dt``."""
    _check_kernel(params, grid, kernel)
    n, w = state.n, state.w
    if params.mode == "nonlocal":
        disperse = apply_nonlocal(kernel, n, method)
    else:
        disperse = laplacian_neumann(n, grid)
    rhs_n = params.d1 * disperse + f_kinetics(n, w, params)
    rhs_w = g_kinetics(n, w, params)
    if params.v > 0:
        rhs_w = advection_x(w, params.v, grid) + rhs_w
    if params.d2 > 0:
        rhs_w = params.d2 * laplacian_neumann(w, grid) + rhs_w
    n_new = n + dt * rhs_n
    w_new = w + dt * rhs_w

    index = state.step_index + 1
    n_new, cn = _admit("n", n_new, index)
    w_new, cw = _admit("w", w_new, index)
    wmax = float(w_new.max())
    if wmax > state.w_cap + BOUND_TOL:
        raise InvariantViolation(index, "water sup bound",
                                 f"max w = {wmax!r} > max(|w0|, a) = {state.w_cap!r}")
    n_new.flags.writeable = False
    w_new.flags.writeable = False
    return replace(state, t=state.t + dt, n=n_new, w=w_new, step_index=index,
                   clamped=state.clamped + cn + cw)


Sink = Callable[[int, float, np.ndarray, np.ndarray, Diagnostics], None]


def run(state0: SimState, params: ModelParams, grid: GridSpec, kernel: DiscreteKernel | None,
        ctl: StepControl, sink: Sink | None = None, method: str = "fft") -> SimState:
    """
    Integrate from ``state0`` to ``ctl.t_end``.

    The sink, if given, is called as ``sink(step_index, t, n, w, diag)`` for
    the initial state, every ``ctl.snapshot_stride`` steps, and the final
    state.  Times are ``t0 + k * dt``; the last step is shortened to land on
    ``t_end`` exactly.

    Raises
    ------
    InvariantViolation
        Propagated from :func:`step`, carrying the failing step index.
    """
    _check_kernel(params, grid, kernel)
    check_field(grid, state0.n, "n")
    check_field(grid, state0.w, "w")

    def emit(s):
        if sink is not None:
            sink(s.step_index, s.t, s.n, s.w, diagnostics(s, grid))

    emit(state0)
    span = ctl.t_end - state0.t
    if span <= 0:
        return state0
    dt = resolve_dt(ctl, params, grid, kernel, state0)
    n_steps = math.ceil(span / dt)
    if n_steps > 1 and (n_steps - 1) * dt >= span:
        n_steps -= 1
    t0, k0 = state0.t, state0.step_index
    state = state0
    for k in range(1, n_steps + 1):
        t_next = ctl.t_end if k == n_steps else t0 + k * dt
        state = step(state, params, grid, kernel, t_next - state.t, method)
        state = replace(state, t=t_next)
        if k == n_steps or (state.step_index - k0) % ctl.snapshot_stride == 0:
            emit(state)
    return state
