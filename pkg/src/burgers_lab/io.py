"""Deterministic artifact writers: JSON reports, CSV series, binary snapshots.

Reruns with identical inputs must produce byte-identical files, so floats are
rendered with 17 significant digits (enough to round-trip any double), JSON
keys are emitted in sorted order, and CSV files use LF endings regardless of
platform.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_MAGIC = b"BLAB0001"


def fmt_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips exactly to the double."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def _emit(obj, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            out.append(f'"{fmt_float(x)}"')  # JSON has no literals for these
        else:
            out.append(fmt_float(x))
    elif isinstance(obj, str):
        out.append(
            '"'
            + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            + '"'
        )
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            out.append(f'{pad}  "{key}": ')
            _emit(obj[key], out, indent + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[")
        for i, item in enumerate(seq):
            _emit(item, out, indent)
            if i < len(seq) - 1:
                out.append(", ")
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} deterministically")


def dumps_json(obj) -> str:
    out: list[str] = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps_json(obj), encoding="utf-8", newline="\n")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(fmt_float(float(cell)))
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_snapshots(path: str | Path, times: np.ndarray, snapshots: np.ndarray) -> None:
    """Binary trajectory dump: magic, n (uint32), frame count (uint64), the
    frame times (float64) and the row-major node values (float64)."""
    times = np.ascontiguousarray(times, dtype="<f8")
    snaps = np.ascontiguousarray(snapshots, dtype="<f8")
    if snaps.ndim != 2 or len(times) != snaps.shape[0]:
        raise ValueError("snapshot array must be (frames, n) matching times")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQ", snaps.shape[1], snaps.shape[0]))
        fh.write(times.tobytes())
        fh.write(snaps.tobytes())


def read_snapshots(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError("not a snapshot file (bad magic)")
    n, frames = struct.unpack_from("<IQ", raw, 8)
    off = 8 + struct.calcsize("<IQ")
    times = np.frombuffer(raw, dtype="<f8", count=frames, offset=off)
    off += frames * 8
    snaps = np.frombuffer(raw, dtype="<f8", count=frames * n, offset=off)
    return times.copy(), snaps.reshape(frames, n).copy()
