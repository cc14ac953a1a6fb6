"""Klausmeier kinetics: biomass growth f(n, w) and water balance g(n, w)."""

from dataclasses import dataclass

import numpy as np

__all__ = ["ModelParams", "f_kinetics", "g_kinetics", "jacobian", "MODES"]

MODES = ("local", "nonlocal")


@dataclass(frozen=True)
class ModelParams:
    """
    Model constants.

    ``d1`` disperses biomass (through the kernel in nonlocal mode, the
    Laplacian in local mode); ``d2`` diffuses water; ``v`` is the downhill
    water speed; ``a`` the rainfall; ``alpha`` the biomass mortality.

    Nonlocal mode requires ``d1, d2 > 0`` with ``d1 != d2``.  Local mode also
    accepts ``d2 == 0``, the water equation without diffusion.
    """

    d1: float = 0.05
    d2: float = 0.003
    v: float = 5.0
    a: float = 0.15
    alpha: float = 0.045
    mode: str = "nonlocal"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("d1", "d2", "v", "a", "alpha"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if not self.d1 > 0:
            raise ValueError(f"d1 must be positive, got {self.d1}")
        if self.mode == "local":
            if self.d2 < 0:
                raise ValueError(f"d2 must be nonnegative, got {self.d2}")
        elif not self.d2 > 0:
            raise ValueError(f"d2 must be positive in nonlocal mode, got {self.d2}")
        if self.d1 == self.d2:
            raise ValueError(f"hypothesis (D) requires d1 != d2, got d1 = d2 = {self.d1}")
        if self.v < 0:
            raise ValueError(f"v must be nonnegative, got {self.v}")
        if not self.a > 0:
            raise ValueError(f"rainfall a must be positive, got {self.a}")
        if not self.alpha > 0:
            raise ValueError(f"mortality alpha must be positive, got {self.alpha}")


def f_kinetics(n, w, p: ModelParams):
    """Biomass kinetics ``w n^2 - alpha n``; works elementwise on arrays."""
    return w * n * n - p.alpha * n


def g_kinetics(n, w, p: ModelParams):
    """Water kinetics ``a - w - w n^2``."""
    return p.a - w - w * n * n


def jacobian(n: float, w: float, p: ModelParams) -> np.ndarray:
    """``[[f_n, f_w], [g_n, g_w]]`` evaluated at ``(n, w)``."""
    return np.array([
        [2.0 * w * n - p.alpha, n * n],
        [-2.0 * w * n, -1.0 - n * n],
    ])
