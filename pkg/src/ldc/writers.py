"""CSV / PGM / JSON writers for scalar fields and run manifests."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .fields import ScalarField

PGM_MAX = 65535
_PGM_TOP = PGM_MAX - 1  # white is reserved for masked cells


def _atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def value_range(field_: ScalarField, lo_pct: float = 1.0, hi_pct: float = 99.0) -> dict:
    valid = field_.values[field_.mask]
    if valid.size == 0:
        return {"min": None, "max": None, "p_lo": None, "p_hi": None, "masked": int(field_.mask.size)}
    p_lo, p_hi = np.percentile(valid, [lo_pct, hi_pct])
    return {
        "min": float(valid.min()),
        "max": float(valid.max()),
        "p_lo": float(p_lo),
        "p_hi": float(p_hi),
        "masked": int(np.count_nonzero(~field_.mask)),
    }


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else format(v, ".17g")


def csv_header(field_: ScalarField) -> str:
    sec = field_.section
    parts = [f"axis{i + 1}={a.name}[{a.lo!r},{a.hi!r}]" for i, a in enumerate(sec.axes)]
    parts.append(f"N={sec.resolution}")
    parts.append("h=" + ",".join(repr(h) for h in sec.spacing))
    parts.append("quantity=" + "/".join([field_.meta.get("quantity", "LD"), *field_.meta.get("post", [])]))
    return "# " + " ".join(parts)


def format_csv(field_: ScalarField) -> str:
    lines = [csv_header(field_)]
    values = np.where(field_.mask, field_.values, np.nan)
    rows = values[None, :] if values.ndim == 1 else values
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(field_: ScalarField, path) -> str:
    """Write ``field_`` as CSV; returns the sha256 of the written bytes."""
    data = format_csv(field_).encode()
    _atomic_write(path, data)
    return hashlib.sha256(data).hexdigest()


def write_landscape_csv(positions, columns: dict, path) -> str:
    names = list(columns)
    lines = ["position," + ",".join(names)]
    for i, x in enumerate(positions):
        lines.append(",".join([_fmt(x), *(_fmt(columns[n][i]) for n in names)]))
    data = ("\n".join(lines) + "\n").encode()
    _atomic_write(path, data)
    return hashlib.sha256(data).hexdigest()


def read_csv(path) -> tuple[str, np.ndarray]:
    """Inverse of :func:`write_csv`: returns ``(header, values)``."""
    text = Path(path).read_text()
    header, _, body = text.partition("\n")
    rows = [[float(v) for v in line.split(",")] for line in body.splitlines() if line]
    return header, np.array(rows)


def pgm_bytes(field_: ScalarField, lo: float | None = None, hi: float | None = None) -> bytes:
    values = np.atleast_2d(field_.values)
    mask = np.atleast_2d(field_.mask)
    if lo is None or hi is None:
        rng = value_range(field_)
        lo, hi = rng["p_lo"], rng["p_hi"]
    pix = np.full(values.shape, PGM_MAX, dtype=np.uint16)
    if lo is not None:
        if hi > lo:
            scaled = np.clip((values - lo) / (hi - lo), 0.0, 1.0) * _PGM_TOP
        else:
            scaled = np.full(values.shape, _PGM_TOP // 2, dtype=np.float64)
        pix[mask] = np.rint(scaled[mask]).astype(np.uint16)
    # image rows run top to bottom, axis2 runs bottom to top
    pix = pix[::-1]
    h, w = pix.shape
    return f"P5\n{w} {h}\n{PGM_MAX}\n".encode() + pix.astype(">u2").tobytes()


def write_pgm(field_: ScalarField, path, lo=None, hi=None) -> str:
    data = pgm_bytes(field_, lo, hi)
    _atomic_write(path, data)
    return hashlib.sha256(data).hexdigest()


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    magic, dims, maxval, rest = raw.split(b"\n", 3)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h = map(int, dims.split())
    dtype = ">u2" if int(maxval) > 255 else "u1"
    return np.frombuffer(rest, dtype=dtype).reshape(h, w)


def write_meta(manifest: dict, path) -> None:
    _atomic_write(path, (json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n").encode())
