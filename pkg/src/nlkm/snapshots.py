"""
Snapshot files.

Three encodings, selected per run:

csv
    ``# t=<t> nx=<nx> ny=<ny> hx=<hx> hy=<hy> field=<n|w>`` followed by ``ny``
    rows of ``nx`` comma-separated values with 17 significant digits; row
    ``j`` holds ``y_j`` (y increasing downward through the file).
raw
    32-byte little-endian header (magic ``NLKM``, u32 nx, u32 ny, 4 zero
    bytes, f64 t, 8 reserved zero bytes) followed by ``nx * ny`` little-endian
    float64 values in row-major order, x fastest.
pgm
    Binary P5 with maxval 65535 (big-endian samples), linear min-max scaling;
    the file's first row is ``y_0``.  A constant field maps to mid-gray 32768.

Files are named ``<field>_<step:06d>.<ext>``.
"""

import glob
import os
import re
import struct
from dataclasses import dataclass, field

import numpy as np

from nlkm.grid import GridSpec

__all__ = [
    "RAW_HEADER",
    "snapshot_name",
    "write_csv",
    "read_csv",
    "write_raw",
    "read_raw",
    "write_pgm",
    "read_pgm",
    "write_snapshot",
    "load_raw_pair",
    "SnapshotRecord",
]

RAW_MAGIC = b"NLKM"
RAW_HEADER = struct.Struct("<4sII4xd8x")
assert RAW_HEADER.size == 32
PGM_MAX = 65535


def snapshot_name(name: str, step_index: int, ext: str) -> str:
    return f"{name}_{step_index:06d}.{ext}"


def _io_error(path, exc):
    return OSError(exc.errno, f"{exc.strerror or exc}: {path}")


def write_csv(path, z, t: float, grid: GridSpec, name: str):
    z = np.asarray(z, dtype=np.float64)
    header = f"t={float(t)!r} nx={grid.nx} ny={grid.ny} hx={grid.hx!r} hy={grid.hy!r} field={name}"
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            np.savetxt(fh, z, fmt="%.16e", delimiter=",", header=header, comments="# ")
    except OSError as exc:
        raise _io_error(path, exc) from exc


def read_csv(path) -> tuple[dict, np.ndarray]:
    """Return the header fields (numbers converted) and the ``(ny, nx)`` array."""
    with open(path, encoding="ascii") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing '# t=...' header line")
        meta = {}
        for item in first[1:].split():
            key, _, value = item.partition("=")
            meta[key] = value
        for key in ("t", "hx", "hy"):
            meta[key] = float(meta[key])
        for key in ("nx", "ny"):
            meta[key] = int(meta[key])
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape != (meta["ny"], meta["nx"]):
        raise ValueError(f"{path}: body shape {data.shape} disagrees with header")
    return meta, data


def write_raw(path, z, t: float):
    z = np.asarray(z, dtype=np.float64)
    ny, nx = z.shape
    try:
        with open(path, "wb") as fh:
            fh.write(RAW_HEADER.pack(RAW_MAGIC, nx, ny, float(t)))
            fh.write(np.ascontiguousarray(z, dtype="<f8").tobytes())
    except OSError as exc:
        raise _io_error(path, exc) from exc


def read_raw(path) -> tuple[float, np.ndarray]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < RAW_HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, nx, ny, t = RAW_HEADER.unpack_from(blob)
    if magic != RAW_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    expected = RAW_HEADER.size + 8 * nx * ny
    if len(blob) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(blob)}")
    z = np.frombuffer(blob, dtype="<f8", offset=RAW_HEADER.size).reshape(ny, nx)
    return t, z.astype(np.float64)


def write_pgm(path, z) -> tuple[float, float, bool]:
    """Write a 16-bit P5 image; returns ``(min, max, degenerate)``."""
    z = np.asarray(z, dtype=np.float64)
    ny, nx = z.shape
    lo, hi = float(z.min()), float(z.max())
    degenerate = not hi > lo
    if degenerate:
        pixels = np.full(z.shape, 32768, dtype=">u2")
    else:
        pixels = np.rint((z - lo) / (hi - lo) * PGM_MAX).astype(">u2")
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{nx} {ny}\n{PGM_MAX}\n".encode("ascii"))
            fh.write(pixels.tobytes())
    except OSError as exc:
        raise _io_error(path, exc) from exc
    return lo, hi, degenerate


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", blob)
    if m is None:
        raise ValueError(f"{path}: not a binary PGM")
    nx, ny, maxval = (int(g) for g in m.groups())
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(blob, dtype=dtype, offset=m.end()).reshape(ny, nx)


@dataclass
class SnapshotRecord:
    step_index: int
    t: float
    files: list = field(default_factory=list)
    pgm_range: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "step_index": self.step_index,
            "t": self.t,
            "files": list(self.files),
            "pgm_range": {k: {"min": v[0], "max": v[1], "degenerate": v[2]}
                          for k, v in self.pgm_range.items()},
        }


def write_snapshot(out_dir, step_index: int, t: float, n, w, grid: GridSpec,
                   formats=("csv", "pgm")) -> SnapshotRecord:
    """Write ``n`` and ``w`` in each requested format under ``out_dir``."""
    record = SnapshotRecord(step_index, float(t))
    for name, z in (("n", n), ("w", w)):
        for fmt in formats:
            path = os.path.join(out_dir, snapshot_name(name, step_index, fmt))
            if fmt == "csv":
                write_csv(path, z, t, grid, name)
            elif fmt == "raw":
                write_raw(path, z, t)
            elif fmt == "pgm":
                record.pgm_range[name] = write_pgm(path, z)
            else:
                raise ValueError(f"unknown snapshot format {fmt!r}")
            record.files.append(os.path.basename(path))
    return record


def load_raw_pair(path, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    Load ``(n, w)`` from raw snapshots.

    ``path`` is either a directory, in which case the highest-step pair is
    used, or an ``n_<step>.raw`` file whose ``w`` companion sits beside it.
    """
    if os.path.isdir(path):
        candidates = sorted(glob.glob(os.path.join(path, "n_*.raw")))
        if not candidates:
            raise FileNotFoundError(f"no n_*.raw snapshots in {path}")
        n_path = candidates[-1]
    else:
        n_path = path
    head, tail = os.path.split(n_path)
    if not tail.startswith("n_"):
        raise ValueError(f"{n_path}: expected an n_<step>.raw file")
    w_path = os.path.join(head, "w_" + tail[2:])
    _, n = read_raw(n_path)
    _, w = read_raw(w_path)
    for name, z in (("n", n), ("w", w)):
        if z.shape != grid.shape:
            raise ValueError(f"{name} snapshot has shape {z.shape}, grid expects {grid.shape}")
    return n, w
