"""Local and nonlocal Klausmeier vegetation models on rectangular grids."""

from nlkm.grid import GridSpec, make_grid, eval_initial_conditions, linf_norm
from nlkm.kernel import (
    KernelSpec,
    DiscreteKernel,
    build_kernel,
    apply_nonlocal,
    apply_nonlocal_direct,
    apply_nonlocal_fft,
    integral_of_gamma,
)
from nlkm.localop import laplacian_neumann, advection_x
from nlkm.reaction import ModelParams, f_kinetics, g_kinetics, jacobian
from nlkm.stepper import (
    SimState,
    StepControl,
    Diagnostics,
    InvariantViolation,
    RunTrace,
    stability_limit,
    stability_limits,
    initial_state,
    step,
    run,
)
from nlkm.analysis import (
    EquilibriumSet,
    TuringReport,
    equilibria,
    turing_report,
    lemma21_identity_residuals,
    comparison_oracle,
    coefficient_of_variation,
    dominant_wavelength,
)

__version__ = "0.1.0"

__all__ = [
    "GridSpec", "make_grid", "eval_initial_conditions", "linf_norm",
    "KernelSpec", "DiscreteKernel", "build_kernel", "apply_nonlocal",
    "apply_nonlocal_direct", "apply_nonlocal_fft", "integral_of_gamma",
    "laplacian_neumann", "advection_x",
    "ModelParams", "f_kinetics", "g_kinetics", "jacobian",
    "SimState", "StepControl", "Diagnostics", "InvariantViolation", "RunTrace",
    "stability_limit", "stability_limits", "initial_state", "step", "run",
    "EquilibriumSet", "TuringReport", "equilibria", "turing_report",
    "lemma21_identity_residuals", "comparison_oracle",
    "coefficient_of_variation", "dominant_wavelength",
]
