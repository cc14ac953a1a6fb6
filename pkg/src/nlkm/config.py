"""
Run configuration: a small sectioned ``key = value`` format.

Example::

    [model]
    mode = nonlocal
    d1 = 0.05

    [grid]
    nx = 150

Every key is optional; missing keys take the defaults of the standard
pattern experiment.  Errors carry the 1-based line they refer to.
"""

import math
from dataclasses import dataclass, field, replace

from nlkm.grid import GridSpec
from nlkm.kernel import KernelSpec
from nlkm.reaction import MODES, ModelParams
from nlkm.stepper import StepControl

__all__ = [
    "ConfigError",
    "ConfigSyntaxError",
    "UnknownKeyError",
    "ConfigTypeError",
    "ConstraintError",
    "InitialCondition",
    "RunConfig",
    "parse_config",
    "render_config",
    "load_config",
    "INITIAL_KINDS",
    "FORMATS",
]

INITIAL_KINDS = ("paper_formulas", "uniform_plus_noise", "from_file")
FORMATS = ("csv", "pgm", "raw")


class ConfigError(ValueError):
    def __init__(self, line: int | None, message: str):
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class ConfigTypeError(ConfigError):
    pass


class ConstraintError(ConfigError):
    pass


@dataclass(frozen=True)
class InitialCondition:
    kind: str = "paper_formulas"
    amplitude: float = 0.01
    seed: int = 0
    path: str = ""


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    grid: GridSpec = field(default_factory=lambda: GridSpec(20.0, 20.0, 150, 150))
    kernel: KernelSpec = field(default_factory=KernelSpec)
    control: StepControl = field(default_factory=StepControl)
    initial: InitialCondition = field(default_factory=InitialCondition)
    output_dir: str = "out"
    formats: tuple[str, ...] = ("csv", "pgm")


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not finite")
    return value


def _int(text):
    if text.strip().lstrip("+-").isdigit():
        return int(text)
    raise ValueError("not an integer")


def _optional_float(text):
    return None if text.strip().lower() in ("auto", "none") else _float(text)


def _word(text):
    return text


def _formats(text):
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    return items


# section -> key -> (parser, type label)
SCHEMA = {
    "model": {
        "mode": (_word, "string"),
        "d1": (_float, "float"),
        "d2": (_float, "float"),
        "v": (_float, "float"),
        "a": (_float, "float"),
        "alpha": (_float, "float"),
    },
    "grid": {
        "lx": (_float, "float"),
        "ly": (_float, "float"),
        "nx": (_int, "integer"),
        "ny": (_int, "integer"),
    },
    "kernel": {
        "sigma": (_float, "float"),
        "cutoff_radii": (_float, "float"),
    },
    "control": {
        "dt": (_optional_float, "float or 'auto'"),
        "t_end": (_float, "float"),
        "safety": (_float, "float"),
        "snapshot_stride": (_int, "integer"),
    },
    "initial": {
        "kind": (_word, "string"),
        "amplitude": (_float, "float"),
        "seed": (_int, "integer"),
        "path": (_word, "string"),
    },
    "output": {
        "dir": (_word, "string"),
        "formats": (_formats, "comma-separated list"),
    },
}


def _unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _scan(text: str):
    """Yield ``(section, key, raw_value, line)`` entries; lines are 1-based."""
    section = None
    header_lines = {}
    seen = {}
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigSyntaxError(lineno, f"malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise UnknownKeyError(lineno, f"unknown section [{section}]")
            header_lines.setdefault(section, lineno)
            continue
        if "=" not in line:
            raise ConfigSyntaxError(lineno, f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if "." in key:
            # ``section.key = value`` works anywhere and leaves the current section alone
            sec, key = key.split(".", 1)
            if sec not in SCHEMA:
                raise UnknownKeyError(lineno, f"unknown section [{sec}]")
            entries.append((sec, key, value, lineno))
        else:
            if section is None:
                raise ConfigSyntaxError(lineno, f"key {key!r} outside of any [section]")
            entries.append((section, key, value, lineno))
    for sec, key, value, lineno in entries:
        if key not in SCHEMA[sec]:
            raise UnknownKeyError(lineno, f"unknown key {key!r} in [{sec}]")
        if (sec, key) in seen:
            raise ConfigSyntaxError(lineno, f"duplicate key {sec}.{key} (first on line {seen[sec, key]})")
        seen[sec, key] = lineno
    return entries, header_lines


def parse_config(text: str) -> RunConfig:
    """
    Parse a configuration document into a validated :class:`RunConfig`.

    Raises
    ------
    ConfigSyntaxError, UnknownKeyError, ConfigTypeError, ConstraintError
        Each carrying the offending line in ``.line``.
    """
    entries, _ = _scan(text)
    values: dict[tuple[str, str], object] = {}
    lines: dict[tuple[str, str], int] = {}
    for sec, key, raw, lineno in entries:
        parser, label = SCHEMA[sec][key]
        raw = _unquote(raw)
        try:
            values[sec, key] = parser(raw)
        except ValueError:
            raise ConfigTypeError(lineno, f"{sec}.{key} expects {label}, got {raw!r}") from None
        lines[sec, key] = lineno

    def get(sec, key, default):
        return values.get((sec, key), default)

    def fail(keys, message):
        found = [lines[k] for k in keys if k in lines]
        raise ConstraintError(max(found) if found else None, message)

    defaults = RunConfig()
    mode = get("model", "mode", defaults.model.mode)
    if mode not in MODES:
        fail([("model", "mode")], f"model.mode must be one of {MODES}, got {mode!r}")
    d2_default = 0.0 if mode == "local" else defaults.model.d2
    m = dict(
        d1=get("model", "d1", defaults.model.d1),
        d2=get("model", "d2", d2_default),
        v=get("model", "v", defaults.model.v),
        a=get("model", "a", defaults.model.a),
        alpha=get("model", "alpha", defaults.model.alpha),
    )
    if m["d1"] == m["d2"]:
        fail([("model", "d1"), ("model", "d2")],
             f"the model requires d1 != d2, got d1 = d2 = {m['d1']}")
    for key, ok, why in (
        ("d1", m["d1"] > 0, "must be positive"),
        ("d2", m["d2"] >= 0 if mode == "local" else m["d2"] > 0,
         "must be nonnegative" if mode == "local" else "must be positive in nonlocal mode"),
        ("v", m["v"] >= 0, "must be nonnegative"),
        ("a", m["a"] > 0, "must be positive"),
        ("alpha", m["alpha"] > 0, "must be positive"),
    ):
        if not ok:
            fail([("model", key)], f"model.{key} {why}, got {m[key]}")
    model = ModelParams(mode=mode, **m)

    g = dict(
        lx=get("grid", "lx", defaults.grid.lx),
        ly=get("grid", "ly", defaults.grid.ly),
        nx=get("grid", "nx", defaults.grid.nx),
        ny=get("grid", "ny", defaults.grid.ny),
    )
    for key in ("lx", "ly"):
        if not g[key] > 0:
            fail([("grid", key)], f"grid.{key} must be positive, got {g[key]}")
    for key in ("nx", "ny"):
        if g[key] < 3:
            fail([("grid", key)], f"grid.{key} must be at least 3, got {g[key]}")
    grid = GridSpec(**g)

    sigma = get("kernel", "sigma", defaults.kernel.sigma)
    radii = get("kernel", "cutoff_radii", defaults.kernel.cutoff_radii)
    if not sigma > 0:
        fail([("kernel", "sigma")], f"kernel.sigma must be positive, got {sigma}")
    if not radii >= 1:
        fail([("kernel", "cutoff_radii")], f"kernel.cutoff_radii must be >= 1, got {radii}")
    if mode == "nonlocal" and sigma * radii > min(grid.lx, grid.ly):
        fail([("kernel", "sigma"), ("kernel", "cutoff_radii"), ("grid", "lx"), ("grid", "ly")],
             f"kernel cutoff {sigma * radii} exceeds the domain (min side {min(grid.lx, grid.ly)})")
    kernel = KernelSpec(sigma, radii)

    c = dict(
        dt=get("control", "dt", defaults.control.dt),
        t_end=get("control", "t_end", defaults.control.t_end),
        safety=get("control", "safety", defaults.control.safety),
        snapshot_stride=get("control", "snapshot_stride", defaults.control.snapshot_stride),
    )
    if c["dt"] is not None and not c["dt"] > 0:
        fail([("control", "dt")], f"control.dt must be positive, got {c['dt']}")
    if not c["t_end"] >= 0:
        fail([("control", "t_end")], f"control.t_end must be nonnegative, got {c['t_end']}")
    if not 0 < c["safety"] <= 1:
        fail([("control", "safety")], f"control.safety must lie in (0, 1], got {c['safety']}")
    if c["snapshot_stride"] < 1:
        fail([("control", "snapshot_stride")],
             f"control.snapshot_stride must be positive, got {c['snapshot_stride']}")
    control = StepControl(**c)

    kind = get("initial", "kind", defaults.initial.kind)
    if kind not in INITIAL_KINDS:
        fail([("initial", "kind")], f"initial.kind must be one of {INITIAL_KINDS}, got {kind!r}")
    amplitude = get("initial", "amplitude", defaults.initial.amplitude)
    if not amplitude >= 0:
        fail([("initial", "amplitude")], f"initial.amplitude must be nonnegative, got {amplitude}")
    seed = get("initial", "seed", defaults.initial.seed)
    if seed < 0:
        fail([("initial", "seed")], f"initial.seed must be nonnegative, got {seed}")
    path = get("initial", "path", defaults.initial.path)
    if kind == "from_file" and not path:
        fail([("initial", "kind")], "initial.kind = from_file needs initial.path")
    initial = InitialCondition(kind, amplitude, seed, path)

    formats = get("output", "formats", defaults.formats)
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        fail([("output", "formats")], f"unsupported output formats {bad}; choose from {FORMATS}")
    if len(set(formats)) != len(formats):
        fail([("output", "formats")], "output.formats lists a format twice")
    output_dir = get("output", "dir", defaults.output_dir)

    return RunConfig(model, grid, kernel, control, initial, output_dir, tuple(formats))


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        if value == "" or value != value.strip() or any(c in value for c in "#=\"'"):
            return '"' + value + '"'
        return value
    if isinstance(value, tuple):
        return ", ".join(value)
    return str(value)


def render_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config`; floats are written with ``repr``."""
    sections = {
        "model": dict(mode=cfg.model.mode, d1=cfg.model.d1, d2=cfg.model.d2, v=cfg.model.v,
                      a=cfg.model.a, alpha=cfg.model.alpha),
        "grid": dict(lx=cfg.grid.lx, ly=cfg.grid.ly, nx=cfg.grid.nx, ny=cfg.grid.ny),
        "kernel": dict(sigma=cfg.kernel.sigma, cutoff_radii=cfg.kernel.cutoff_radii),
        "control": dict(dt=cfg.control.dt, t_end=cfg.control.t_end, safety=cfg.control.safety,
                        snapshot_stride=cfg.control.snapshot_stride),
        "initial": dict(kind=cfg.initial.kind, amplitude=cfg.initial.amplitude,
                        seed=cfg.initial.seed, path=cfg.initial.path),
        "output": dict(dir=cfg.output_dir, formats=cfg.formats),
    }
    out = []
    for name, items in sections.items():
        out.append(f"[{name}]")
        for key, value in items.items():
            out.append(f"{key} = {_fmt(value)}")
        out.append("")
    return "\n".join(out)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_dt(cfg: RunConfig, dt: float) -> RunConfig:
    return replace(cfg, control=replace(cfg.control, dt=dt))
