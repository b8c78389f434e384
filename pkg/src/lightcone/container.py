"""Binary container for states, cone profiles and trajectories.

Layout: an 8-byte little-endian unsigned header length, the UTF-8 JSON
header, then the arrays as little-endian float64 in header order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .fields import CauchyData, Grid, ModeIndex, Trajectory
from .radiation import RadiationProfile

__all__ = [
    "FORMAT",
    "VERSION",
    "write_container",
    "read_container",
    "save_state",
    "load_state",
    "save_radiation",
    "load_radiation",
    "save_trajectory",
    "load_trajectory",
    "load_any",
]

FORMAT = "lightcone-container"
VERSION = 1
_LEN = struct.Struct("<Q")


def _mode_key(mode: ModeIndex) -> list[int]:
    return mode.as_list()


def write_container(path, kind: str, grid: Grid, arrays, meta: dict | None = None, provenance: dict | None = None):
    """Write ``arrays``, a list of ``(name, mode or None, ndarray)``."""
    entries = []
    blobs = []
    for name, mode, arr in arrays:
        a = np.ascontiguousarray(arr, dtype="<f8")
        entries.append({"name": name, "mode": _mode_key(mode) if mode is not None else None, "shape": list(a.shape)})
        blobs.append(a.tobytes())
    modes = sorted({tuple(e["mode"]) for e in entries if e["mode"] is not None})
    header = {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "dimension": modes[0][0] if modes else None,
        "modes": [list(m) for m in modes],
        "grid": {"M": grid.M, "s_max": grid.s_max},
        "provenance": provenance or {},
        "meta": meta or {},
        "arrays": entries,
    }
    raw = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_LEN.pack(len(raw)))
        fh.write(raw)
        for b in blobs:
            fh.write(b)
    return path


def read_container(path):
    """Return ``(header, grid, [(name, mode, array), ...])``."""
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise ValueError("truncated container")
    (n,) = _LEN.unpack_from(data, 0)
    header = json.loads(data[8 : 8 + n].decode("utf-8"))
    if header.get("format") != FORMAT:
        raise ValueError("not a lightcone container")
    if header.get("version") != VERSION:
        raise ValueError(f"unsupported container version {header.get('version')}")
    grid = Grid(int(header["grid"]["M"]), float(header["grid"]["s_max"]))
    pos = 8 + n
    out = []
    for e in header["arrays"]:
        shape = tuple(e["shape"])
        count = int(np.prod(shape)) if shape else 1
        if pos + 8 * count > len(data):
            raise ValueError("container size does not match its header (truncated data)")
        a = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shape).astype(float)
        pos += 8 * count
        mode = ModeIndex(*e["mode"]) if e["mode"] is not None else None
        out.append((e["name"], mode, a))
    if pos != len(data):
        raise ValueError("container size does not match its header")
    return header, grid, out


def save_state(path, state: CauchyData, provenance=None):
    arrays = []
    for m in state.modes:
        arrays.append(("field", m, state.field[m]))
        arrays.append(("velocity", m, state.velocity[m]))
    return write_container(path, "cauchy", state.grid, arrays, provenance=provenance)


def load_state(path) -> CauchyData:
    header, grid, arrays = read_container(path)
    if header["kind"] != "cauchy":
        raise ValueError(f"expected a state container, found {header['kind']!r}")
    f = {m: a for n, m, a in arrays if n == "field"}
    v = {m: a for n, m, a in arrays if n == "velocity"}
    return CauchyData(grid, f, v)


def save_radiation(path, F: RadiationProfile, provenance=None):
    arrays = [("profile", m, F.samples[m]) for m in F.modes]
    meta = {"parity": [[*m.as_list(), p] for m, p in F.parity.items()]}
    return write_container(path, "radiation", F.grid, arrays, meta=meta, provenance=provenance)


def load_radiation(path) -> RadiationProfile:
    header, grid, arrays = read_container(path)
    if header["kind"] != "radiation":
        raise ValueError(f"expected a radiation container, found {header['kind']!r}")
    par = {ModeIndex(*p[:3]): p[3] for p in header["meta"].get("parity", [])}
    return RadiationProfile(grid, {m: a for _, m, a in arrays}, par)


def save_trajectory(path, tr: Trajectory, provenance=None):
    arrays = [("times", None, tr.times)]
    for m in tr.modes:
        arrays.append(("field", m, tr.field[m]))
        arrays.append(("velocity", m, tr.velocity[m]))
    return write_container(path, "trajectory", tr.grid, arrays, provenance=provenance)


def load_trajectory(path) -> Trajectory:
    header, grid, arrays = read_container(path)
    if header["kind"] != "trajectory":
        raise ValueError(f"expected a trajectory container, found {header['kind']!r}")
    times = next(a for n, m, a in arrays if n == "times")
    f = {m: a for n, m, a in arrays if n == "field"}
    v = {m: a for n, m, a in arrays if n == "velocity"}
    return Trajectory(grid, times, f, v)


def load_any(path):
    header, _, _ = read_container(path)
    return {"cauchy": load_state, "radiation": load_radiation, "trajectory": load_trajectory}[header["kind"]](path)
