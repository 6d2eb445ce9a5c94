"""File formats: PHM binary phase maps, PGM preview images, benchmark CSV."""

import csv
import math
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .errors import PhmFormatError
from .grid import MapKind, PhaseMap, wrap_array

PHM_MAGIC = b"PHM1"
_HEADER = struct.Struct("<4sIIB")  # magic, width, height, kind byte


def write_phm(pmap: PhaseMap, path) -> None:
    """Binary phase map: 13-byte header then row-major little-endian float64."""
    kind_byte = 0 if pmap.kind is MapKind.WRAPPED else 1
    header = _HEADER.pack(PHM_MAGIC, pmap.cols, pmap.rows, kind_byte)
    payload = np.ascontiguousarray(pmap.values, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_phm(path) -> PhaseMap:
    """Inverse of write_phm; every parse failure names its byte offset."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise PhmFormatError("file too short for the header", offset=len(raw))
    magic, width, height, kind_byte = _HEADER.unpack_from(raw)
    if magic != PHM_MAGIC:
        raise PhmFormatError(f"bad magic {magic!r}", offset=0)
    if width < 2:
        raise PhmFormatError(f"width must be >= 2, got {width}", offset=4)
    if height < 2:
        raise PhmFormatError(f"height must be >= 2, got {height}", offset=8)
    if kind_byte not in (0, 1):
        raise PhmFormatError(f"unknown kind byte {kind_byte}", offset=12)
    expected = height * width * 8
    body = raw[_HEADER.size:]
    if len(body) != expected:
        raise PhmFormatError(
            f"payload holds {len(body)} bytes, expected {expected}",
            offset=len(raw),
        )
    values = np.frombuffer(body, dtype="<f8").reshape(height, width).astype(np.float64)
    finite = np.isfinite(values)
    if not finite.all():
        idx = int(np.argwhere(~finite.ravel())[0][0])
        raise PhmFormatError(
            f"non-finite value at cell {divmod(idx, width)}",
            offset=_HEADER.size + idx * 8,
        )
    if kind_byte == 0:
        bad = (values > math.pi) | (values <= -math.pi)
        if bad.any():
            idx = int(np.argwhere(bad.ravel())[0][0])
            r, c = divmod(idx, width)
            raise PhmFormatError(
                f"wrapped value {values[r, c]!r} at cell ({r}, {c}) outside (-pi, pi]",
                offset=_HEADER.size + idx * 8,
            )
    kind = MapKind.WRAPPED if kind_byte == 0 else MapKind.UNWRAPPED
    return PhaseMap(values, kind)


def write_pgm(pmap: PhaseMap, path, rewrap: bool = False) -> None:
    """8-bit binary PGM preview. Wrapped maps scale (-pi, pi] linearly onto
    0..255; unwrapped maps are min-max scaled, or wrapped first when ``rewrap``
    is set (the usual display convention for fringe images)."""
    values = pmap.values
    if pmap.kind is MapKind.WRAPPED or rewrap:
        if pmap.kind is not MapKind.WRAPPED:
            values = wrap_array(values)
        t = (values + math.pi) / (2.0 * math.pi)
    else:
        lo, hi = float(values.min()), float(values.max())
        t = np.full_like(values, 0.5) if hi == lo else (values - lo) / (hi - lo)
    pixels = np.clip(np.round(t * 255.0), 0, 255).astype(np.uint8)
    header = f"P5\n{pmap.cols} {pmap.rows}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pixels.tobytes())


BENCH_CSV_COLUMNS = (
    "scale",
    "rows",
    "cols",
    "nnz",
    "density_pct",
    "preconditioner",
    "p",
    "outer_iters",
    "inner_iters_total",
    "precond_build_s",
    "precond_build_pct",
    "pcg_s",
    "total_s",
    "q_raw",
    "q_mean_aligned",
    "exit_reason",
    "seed",
)

_CSV_FORMATS = {
    "scale": "{:g}",
    "density_pct": "{:.4f}",
    "p": "{:g}",
    "precond_build_s": "{:.6f}",
    "precond_build_pct": "{:.4f}",
    "pcg_s": "{:.6f}",
    "total_s": "{:.6f}",
    "q_raw": "{:.8g}",
    "q_mean_aligned": "{:.8g}",
}


def append_bench_csv(record, path) -> None:
    """Append one benchmark row, writing the header when the file is new."""
    path = Path(path)
    fields = asdict(record)
    row = []
    for col in BENCH_CSV_COLUMNS:
        value = fields[col]
        fmt = _CSV_FORMATS.get(col)
        row.append(fmt.format(value) if fmt is not None else str(value))
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(BENCH_CSV_COLUMNS)
        writer.writerow(row)


def read_bench_csv(path) -> list[dict]:
    """Rows of a benchmark CSV with numeric fields parsed back."""
    out = []
    with open(path, newline="", encoding="ascii") as fh:
        for raw in csv.DictReader(fh):
            row = dict(raw)
            for key in ("scale", "density_pct", "p", "precond_build_s",
                        "precond_build_pct", "pcg_s", "total_s", "q_raw", "q_mean_aligned"):
                row[key] = float(row[key])
            for key in ("rows", "cols", "nnz", "outer_iters", "inner_iters_total", "seed"):
                row[key] = int(row[key])
            out.append(row)
    return out
