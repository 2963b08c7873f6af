"""Deterministic artifact writers shared by the command line driver.

Three formats cover everything the driver emits: curve/sweep tables as CSV
with a commented metadata preamble, structured reports as sorted JSON, and
dense complex kernels as a small self-describing binary dump.  Identical
inputs must produce bit-identical files, so floats are rendered with the
shortest round-trip format, JSON keys are sorted, and no timestamps or
machine identifiers appear anywhere.  Every artifact embeds the package
version and the grid it was computed on.
"""

from __future__ import annotations

import json
import struct
from typing import Dict, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .grids import LineGrid, LogGrid

ARTIFACT_VERSION = "0.1.0"

_KERNEL_MAGIC = b"S1DKERN1"


def run_metadata(grid: LineGrid, log_grid: Optional[LogGrid] = None,
                 **extra) -> Dict[str, object]:
    """The metadata block stamped into every artifact."""
    meta: Dict[str, object] = {
        "version": ARTIFACT_VERSION,
        "grid_n": grid.n,
        "grid_x_max": grid.x_max,
    }
    if log_grid is not None:
        meta["log_m"] = log_grid.m
        meta["log_u_min"] = log_grid.u_min
        meta["log_u_max"] = log_grid.u_max
    meta.update(extra)
    return meta


def _render(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_table(path, names: Sequence[str], columns: Sequence[np.ndarray],
                meta: Dict[str, object]) -> None:
    """A CSV table with '# key=value' metadata lines above the header.

    Complex columns are split into '<name>_re' and '<name>_im' so the file
    stays plain text; all floats use the shortest exact decimal form.
    """
    if len(names) != len(columns):
        raise ConfigError("column names and data disagree in count")
    flat_names = []
    flat_cols = []
    for name, col in zip(names, columns):
        arr = np.asarray(col)
        if np.iscomplexobj(arr):
            flat_names.extend([name + "_re", name + "_im"])
            flat_cols.extend([arr.real, arr.imag])
        else:
            flat_names.append(name)
            flat_cols.append(arr)
    rows = flat_cols[0].shape[0]
    if any(c.shape[0] != rows for c in flat_cols):
        raise ConfigError("table columns have unequal lengths")
    lines = [f"# {key}={_render(meta[key])}" for key in sorted(meta)]
    lines.append(",".join(flat_names))
    for i in range(rows):
        lines.append(",".join(_render(c[i]) for c in flat_cols))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _json_default(value):
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_report(path, payload: Dict[str, object],
                 meta: Dict[str, object]) -> None:
    """A JSON report with the metadata block under the 'meta' key."""
    doc = dict(payload)
    doc["meta"] = meta
    text = json.dumps(doc, sort_keys=True, indent=2, default=_json_default)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def write_kernel(path, values: np.ndarray) -> None:
    """Dump a dense complex matrix: magic, int64 shape, row-major complex128.

    All fields are little-endian; the complex entries are (re, im) float64
    pairs, which is the native numpy complex128 layout.
    """
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if arr.ndim != 2:
        raise ConfigError("kernel dump expects a 2-d array")
    with open(path, "wb") as fh:
        fh.write(_KERNEL_MAGIC)
        fh.write(struct.pack("<qq", arr.shape[0], arr.shape[1]))
        fh.write(arr.astype("<c16").tobytes(order="C"))


def read_kernel(path) -> np.ndarray:
    """Read back a kernel dump, validating magic and payload size."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _KERNEL_MAGIC:
        raise ConfigError(f"{path}: not a kernel dump (bad magic)")
    rows, cols = struct.unpack("<qq", blob[8:24])
    expect = rows * cols * 16
    body = blob[24:]
    if len(body) != expect or rows < 0 or cols < 0:
        raise ConfigError(f"{path}: kernel dump payload is truncated")
    flat = np.frombuffer(body, dtype="<c16")
    return flat.reshape(rows, cols).astype(np.complex128)
