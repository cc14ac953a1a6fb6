"""
Run orchestration behind the command-line interface.

Each ``cmd_*`` function takes parsed configuration, writes its artifacts,
and returns a plain dict summary; :mod:`nlkm.cli` turns exceptions into exit
codes.  ``simulate`` writes ``manifest.json`` next to the snapshots: it holds
the configuration with the step size pinned, so feeding the manifest back to
``simulate`` repeats the run bit for bit.
"""

import json
import math
import os
import platform
import time
from dataclasses import replace

import numpy as np

from nlkm import __version__
from nlkm.analysis import (
    coefficient_of_variation,
    dominant_wavelength,
    equilibria,
    turing_report,
)
from nlkm.config import RunConfig, load_config, parse_config, render_config, with_dt
from nlkm.grid import GridSpec, eval_initial_conditions
from nlkm.kernel import build_kernel
from nlkm.snapshots import load_raw_pair, write_snapshot
from nlkm.stepper import initial_state, resolve_dt, run, stability_limits

__all__ = [
    "noise_field",
    "build_initial",
    "prepare",
    "cmd_simulate",
    "cmd_analyze",
    "cmd_kernel_info",
    "cmd_compare",
    "load_run_config",
    "format_analysis",
]

MANIFEST = "manifest.json"


def _uniform01(seed: int, stream: int, i: int, j: int) -> float:
    # One Philox block per (seed, stream, i, j): independent of traversal order.
    bits = np.random.Philox(counter=[i, j, stream, 0], key=seed).random_raw()
    return (int(bits) >> 11) * 2.0 ** -53


def noise_field(grid: GridSpec, seed: int, stream: int = 0) -> np.ndarray:
    """Uniform [0, 1) samples keyed on ``(seed, stream, i, j)``."""
    out = np.empty(grid.shape)
    for j in range(grid.ny):
        for i in range(grid.nx):
            out[j, i] = _uniform01(seed, stream, i, j)
    return out


def build_initial(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    grid, ic = cfg.grid, cfg.initial
    if ic.kind == "paper_formulas":
        return eval_initial_conditions(grid)
    if ic.kind == "uniform_plus_noise":
        eq = equilibria(cfg.model)
        n_bar, w_bar = eq.vegetated[-1] if eq.vegetated else eq.bare_soil
        n = n_bar + ic.amplitude * (2.0 * noise_field(grid, ic.seed, 0) - 1.0)
        w = w_bar + ic.amplitude * (2.0 * noise_field(grid, ic.seed, 1) - 1.0)
        return np.maximum(n, 0.0), np.maximum(w, 0.0)
    if ic.kind == "from_file":
        return load_raw_pair(ic.path, grid)
    raise ValueError(f"unknown initial condition {ic.kind!r}")


def prepare(cfg: RunConfig):
    """Build ``(kernel or None, initial state, dt)`` for a configuration."""
    kernel = build_kernel(cfg.grid, cfg.kernel) if cfg.model.mode == "nonlocal" else None
    n0, w0 = build_initial(cfg)
    state0 = initial_state(n0, w0, cfg.model, cfg.grid)
    dt = resolve_dt(cfg.control, cfg.model, cfg.grid, kernel, state0)
    return kernel, state0, dt


def load_run_config(path) -> RunConfig:
    """Read a config file, or the pinned config stored in a run manifest."""
    if str(path).endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        return parse_config(manifest["config_text"])
    return load_config(path)


def _finite(x):
    return x if math.isfinite(x) else None


def cmd_simulate(cfg: RunConfig, out_dir: str | None = None, method: str = "fft") -> dict:
    """
    Run one model and write snapshots plus ``manifest.json``.

    Returns the manifest as a dict.  The run writes nothing past the failing
    step if an invariant breaks; the exception propagates.
    """
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    started = time.time()
    kernel, state0, dt = prepare(cfg)
    pinned = with_dt(cfg, dt)
    limits = stability_limits(cfg.model, cfg.grid, kernel, state0.n, state0.w)

    snapshots = []

    def sink(step_index, t, n, w, diag):
        record = write_snapshot(out_dir, step_index, t, n, w, cfg.grid, cfg.formats)
        entry = record.as_dict()
        entry["diagnostics"] = diag.as_dict()
        snapshots.append(entry)

    final = run(state0, cfg.model, cfg.grid, kernel, pinned.control, sink, method)

    manifest = {
        "tool": "nlkm",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config_text": render_config(pinned),
        "derived": {
            "hx": cfg.grid.hx,
            "hy": cfg.grid.hy,
            "dt": dt,
            "n_steps": final.step_index - state0.step_index,
            "lambda_disc": kernel.lambda_disc if kernel is not None else None,
            "stability_limits": {k: _finite(v) for k, v in limits.items()},
            "w_cap": state0.w_cap,
            "nonlocal_method": method,
        },
        "wall_clock": {
            "started": time.strftime("%Y-%m-%dT%H:%M:%S%z", time.localtime(started)),
            "seconds": time.time() - started,
        },
        "final": {"t": final.t, "step_index": final.step_index, "clamped": final.clamped},
        "snapshots": snapshots,
    }
    path = os.path.join(out_dir, MANIFEST)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
    except OSError as exc:
        raise OSError(exc.errno, f"{exc.strerror}: {path}") from exc
    return manifest


def cmd_analyze(cfg: RunConfig) -> dict:
    eq = equilibria(cfg.model)
    reports = [turing_report(cfg.model, e) for e in eq.all]
    return {
        "params": {k: getattr(cfg.model, k) for k in ("mode", "d1", "d2", "v", "a", "alpha")},
        "discriminant": eq.discriminant,
        "bare_soil": list(eq.bare_soil),
        "vegetated": [list(e) for e in eq.vegetated],
        "reports": [r.as_dict() for r in reports],
        "scope": "Turing conditions use the two-diffusion (Laplacian) form; "
                 "the nonlocal dispersion relation is not evaluated",
    }


def _mark(flag: bool) -> str:
    return "yes" if flag else "no"


def format_analysis(doc: dict) -> str:
    """Human-readable table for :func:`cmd_analyze` output."""
    lines = [
        f"a = {doc['params']['a']!r}, alpha = {doc['params']['alpha']!r}, "
        f"d1 = {doc['params']['d1']!r}, d2 = {doc['params']['d2']!r}",
        f"discriminant a^2 - 4 alpha^2 = {doc['discriminant']!r}",
        "",
        f"{'state':<11}{'n':>22}{'w':>22}{'trace':>14}{'det':>14}  verdict",
    ]
    labels = ["bare soil"] + [f"vegetated{i + 1}" for i in range(len(doc["vegetated"]))]
    for label, rep in zip(labels, doc["reports"]):
        n, w = rep["equilibrium"]
        lines.append(f"{label:<11}{n!r:>22}{w!r:>22}{rep['trace']:>14.6g}{rep['det']:>14.6g}  {rep['verdict']}")
    lines.append("")
    printed_names = ["f_w+g_n<0", "f_w*g_n-f_n*g_w>0", "d2*f_w+d1*g_n>0", "(d2*f_w+d1*g_n)^2>4d1d2(..)"]
    standard_names = ["tr J<0", "det J>0", "d2*f_n+d1*g_w>0", "(d2*f_n+d1*g_w)^2>4d1d2 det"]
    for label, rep in zip(labels, doc["reports"]):
        lines.append(f"{label}:")
        lines.append("  printed  : " + ", ".join(
            f"{name}={_mark(flag)}" for name, flag in zip(printed_names, rep["printed_conditions"])))
        lines.append("  standard : " + ", ".join(
            f"{name}={_mark(flag)}" for name, flag in zip(standard_names, rep["standard_conditions"])))
        for note in rep["notes"]:
            lines.append(f"  note     : {note}")
    lines.append("")
    lines.append(doc["scope"])
    return "\n".join(lines)


def cmd_kernel_info(cfg: RunConfig) -> dict:
    kernel = build_kernel(cfg.grid, cfg.kernel)
    kx, ky = kernel.half_width
    mass = kernel.boundary_mass
    return {
        "sigma": cfg.kernel.sigma,
        "cutoff": cfg.kernel.cutoff,
        "lambda_disc": kernel.lambda_disc,
        "boundary_mass": {
            "min": float(mass.min()),
            "mean": float(mass.mean()),
            "max": float(mass.max()),
        },
        "stencil_half_width": [kx, ky],
        "stencil_shape": list(kernel.stencil.shape),
        "nonzero_weights": int(np.count_nonzero(kernel.stencil)),
        "fft_shape": list(kernel._fft_shape),
    }


def cmd_compare(cfg_local: RunConfig, cfg_nonlocal: RunConfig, out_dir: str) -> dict:
    """
    Run the local and nonlocal models from the same initial data.

    Both runs start from the nonlocal configuration's initial condition;
    the grids and end times must agree.  Writes ``local/`` and ``nonlocal/``
    run directories plus ``compare.json``.
    """
    if cfg_local.model.mode != "local" or cfg_nonlocal.model.mode != "nonlocal":
        raise ValueError("compare expects a local-mode and a nonlocal-mode configuration")
    if cfg_local.grid != cfg_nonlocal.grid:
        raise ValueError("compare needs identical grids")
    if cfg_local.control.t_end != cfg_nonlocal.control.t_end:
        raise ValueError("compare needs identical end times")
    cfg_local = replace(cfg_local, initial=cfg_nonlocal.initial)

    finals = {}
    manifests = {}
    for label, cfg in (("local", cfg_local), ("nonlocal", cfg_nonlocal)):
        sub = os.path.join(out_dir, label)
        formats = cfg.formats if "raw" in cfg.formats else cfg.formats + ("raw",)
        manifests[label] = cmd_simulate(replace(cfg, formats=formats), sub)
        last = manifests[label]["snapshots"][-1]
        n_file = next(f for f in last["files"] if f.startswith("n_") and f.endswith(".raw"))
        n, _ = load_raw_pair(os.path.join(sub, n_file), cfg.grid)
        finals[label] = n

    grid = cfg_nonlocal.grid
    diff = finals["local"] - finals["nonlocal"]
    summary = {
        "t_end": cfg_nonlocal.control.t_end,
        "l2_distance_n": float(np.sqrt(np.sum(diff * diff) * grid.cell_area)),
        "linf_distance_n": float(np.max(np.abs(diff))),
        "pattern": {
            label: {
                "cv_n": coefficient_of_variation(n),
                "dominant_wavelength_n": _finite(dominant_wavelength(n, grid)),
                "mean_n": float(n.mean()),
            }
            for label, n in finals.items()
        },
    }
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "compare.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    return summary
