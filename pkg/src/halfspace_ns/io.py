"""Output artifacts: time-series CSV, binary state dumps, CSV slices, summaries.

Binary dump layout (little-endian):
    bytes 0-3   magic b"HSNS"
    uint32      format version (1)
    uint32      dim d
    uint32 * d  node counts (normal axis first)
    float64 * d grid spacings
    float64     domain length L
    float64     time stamp
    float64[]   phi, row-major
    float64[] * d  psi components, row-major
"""

import csv
import json
import struct

import numpy as np

from .diagnostics import NormReport
from .errors import ValidationError
from .state import PerturbationState

MAGIC = b"HSNS"
VERSION = 1


def write_timeseries_csv(path, reports):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(NormReport.CSV_COLUMNS)
        for rep in reports:
            writer.writerow(rep.csv_row())


def write_state_dump(path, state: PerturbationState):
    grid = state.grid
    d = grid.dim
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, d))
        fh.write(struct.pack(f"<{d}I", *state.phi.shape))
        fh.write(struct.pack(f"<{d}d", *grid.h))
        fh.write(struct.pack("<dd", grid.L, state.t))
        fh.write(np.ascontiguousarray(state.phi, dtype="<f8").tobytes())
        for c in range(d):
            fh.write(np.ascontiguousarray(state.psi[c], dtype="<f8").tobytes())


def read_state_dump(path):
    """Returns (meta dict, phi, psi) as plain arrays."""
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValidationError(f"{path} is not a state dump")
        version, d = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ValidationError(f"unsupported dump version {version}")
        n = struct.unpack(f"<{d}I", fh.read(4 * d))
        h = struct.unpack(f"<{d}d", fh.read(8 * d))
        L, t = struct.unpack("<dd", fh.read(16))
        count = int(np.prod(n))
        phi = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(n).copy()
        psi = np.stack([
            np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(n).copy()
            for _ in range(d)
        ])
    meta = {"version": version, "dim": d, "n": n, "h": h, "L": L, "t": t}
    return meta, phi, psi


def write_slice_csv(path, state: PerturbationState, tangential_index=None):
    """Normal-direction profile slice at one tangential station."""
    grid = state.grid
    if tangential_index is None:
        tangential_index = tuple(s // 2 for s in grid.field_shape[1:])
    elif np.isscalar(tangential_index):
        tangential_index = (int(tangential_index),) * (grid.dim - 1)
    idx = (slice(None),) + tuple(tangential_index)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y1", "x1", "phi"] + [f"psi{c + 1}" for c in range(grid.dim)])
        phi = state.phi[idx]
        x1 = grid.x1[idx]
        for j in range(grid.y1.size):
            row = [grid.y1[j], x1[j], phi[j]]
            row += [state.psi[(c,) + (j,) + tuple(tangential_index)]
                    for c in range(grid.dim)]
            writer.writerow([f"{v:.17g}" for v in row])


def write_summary_json(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)!r}")
