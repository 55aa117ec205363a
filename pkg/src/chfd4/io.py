"""Config parsing and on-disk formats: energy traces, convergence tables,
suite reports, raw binary field snapshots, and legacy-VTK export.

Config files are flat `key = value` text, one setting per line, `#` comments:

    grid.N = 32
    grid.L = 3.2
    scheme.eps = 1.0
    scheme.dt = 0.01
    scheme.A = 0.0625
    scheme.T = 0.16
    scheme.newton_tol = 1e-11
    scheme.newton_max = 50
    init.kind = manufactured        # manufactured | random | file
    init.seed = 7                   # random init only
    init.amplitude = 0.1
    init.mean = 0.0
    init.path = phi0.chf4           # file init only
    forcing = manufactured          # manufactured | none
    output.dir = out
    output.energy_every = 1
    output.snapshot_every = 0

Field snapshots are raw binary: magic "CHF4", version u32, N u32, L f64,
then N^3 little-endian f64 values with x varying fastest.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .grid import Field, Grid3, make_grid

SNAPSHOT_MAGIC = b"CHF4"
SNAPSHOT_VERSION = 1

ENERGY_HEADER = "step,time,mass,E_h,modified_E,newton_iters,residual"
ERRORS_HEADER = "N,h,dt,l2_error,linf_error"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    N: int = 32
    L: float = 3.2
    eps: float = 1.0
    dt: float = 0.01
    A: float = 1.0 / 16.0
    T: float = 0.16
    newton_tol: float = 1e-11
    newton_max: int = 50
    init_kind: str = "manufactured"
    init_seed: int = 0
    init_amplitude: float = 0.1
    init_mean: float = 0.0
    init_path: str = ""
    forcing: str = "manufactured"
    output_dir: str = "out"
    energy_every: int = 1
    snapshot_every: int = 0


_FIELD_MAP = {
    "grid.N": ("N", int),
    "grid.L": ("L", float),
    "scheme.eps": ("eps", float),
    "scheme.dt": ("dt", float),
    "scheme.A": ("A", float),
    "scheme.T": ("T", float),
    "scheme.newton_tol": ("newton_tol", float),
    "scheme.newton_max": ("newton_max", int),
    "init.kind": ("init_kind", str),
    "init.seed": ("init_seed", int),
    "init.amplitude": ("init_amplitude", float),
    "init.mean": ("init_mean", float),
    "init.path": ("init_path", str),
    "forcing": ("forcing", str),
    "output.dir": ("output_dir", str),
    "output.energy_every": ("energy_every", int),
    "output.snapshot_every": ("snapshot_every", int),
}


def parse_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = RunConfig()
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_MAP:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        attr, conv = _FIELD_MAP[key]
        try:
            setattr(cfg, attr, conv(value))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.N < 6:
        raise ConfigError(f"grid.N must be at least 6, got {cfg.N}")
    if cfg.L <= 0:
        raise ConfigError(f"grid.L must be positive, got {cfg.L}")
    if cfg.eps <= 0 or cfg.dt <= 0:
        raise ConfigError("scheme.eps and scheme.dt must be positive")
    if cfg.init_kind not in ("manufactured", "random", "file"):
        raise ConfigError(f"init.kind must be manufactured|random|file, got {cfg.init_kind!r}")
    if cfg.forcing not in ("manufactured", "none"):
        raise ConfigError(f"forcing must be manufactured|none, got {cfg.forcing!r}")
    if cfg.init_kind == "file" and not cfg.init_path:
        raise ConfigError("init.kind = file requires init.path")
    steps = cfg.T / cfg.dt
    if abs(steps - round(steps)) > 0.5:
        raise ConfigError(f"T/dt = {steps} is not within 0.5 of an integer")


def fmt(x: float) -> str:
    """Locale-independent scientific formatting, 17 significant digits."""
    return f"{x:.16e}"


def write_energy_csv(path, rows) -> None:
    """rows: iterables of (step, time, mass, E, modE, newton_iters, residual)."""
    with open(path, "w", newline="\n") as fh:
        fh.write(ENERGY_HEADER + "\n")
        for step, time, mass, E, modE, iters, resid in rows:
            fh.write(
                f"{step},{fmt(time)},{fmt(mass)},{fmt(E)},{fmt(modE)},{iters},{fmt(resid)}\n"
            )


def write_errors_csv(path, table) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(ERRORS_HEADER + "\n")
        for r in table.rows:
            fh.write(f"{r.N},{fmt(r.h)},{fmt(r.dt)},{fmt(r.l2_error)},{fmt(r.linf_error)}\n")


def write_report_json(path, checks) -> None:
    payload = {
        "checks": [
            {"name": c.name, "N": c.N, "margin": c.margin, "passed": bool(c.passed)}
            for c in checks
        ],
        "all_passed": all(c.passed for c in checks),
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_snapshot(path, f: Field) -> None:
    """Write a field as raw binary, x index varying fastest."""
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<II", SNAPSHOT_VERSION, f.grid.N))
        fh.write(struct.pack("<d", f.grid.L))
        fh.write(np.asarray(f.values, dtype="<f8").ravel(order="F").tobytes())


def read_snapshot(path) -> Field:
    data = Path(path).read_bytes()
    if len(data) < 20:
        raise ValueError(f"{path}: truncated header ({len(data)} bytes)")
    if data[:4] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a CHF4 field file")
    version, N = struct.unpack("<II", data[4:12])
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    (L,) = struct.unpack("<d", data[12:20])
    expected = 20 + 8 * N**3
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, got {len(data)}")
    values = np.frombuffer(data[20:], dtype="<f8").reshape((N, N, N), order="F")
    return Field(make_grid(N, L), np.ascontiguousarray(values))


def write_vtk(path, f: Field) -> None:
    """Legacy VTK structured-points export (auxiliary visualization)."""
    g = f.grid
    with open(path, "w", newline="\n") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("chfd4 field snapshot\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {g.N} {g.N} {g.N}\n")
        fh.write(f"ORIGIN {fmt(0.5 * g.h)} {fmt(0.5 * g.h)} {fmt(0.5 * g.h)}\n")
        fh.write(f"SPACING {fmt(g.h)} {fmt(g.h)} {fmt(g.h)}\n")
        fh.write(f"POINT_DATA {g.N ** 3}\n")
        fh.write("SCALARS phi double 1\nLOOKUP_TABLE default\n")
        for v in f.values.ravel(order="F"):
            fh.write(fmt(float(v)) + "\n")
