"""Deterministic, atomic file emission with a provenance header."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import platform
import tempfile
from pathlib import Path

import numpy as np
import scipy

from . import __version__


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=float)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def versions() -> dict:
    return {"eitbleach": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def header_line(config) -> str:
    v = " ".join(f"{k}={val}" for k, val in versions().items())
    return f"# config_sha256={config_hash(config)} {v}\n"


def fmt(x) -> str:
    return repr(float(x))


def csv_text(columns: list[str], rows, config) -> str:
    buf = io.StringIO()
    buf.write(header_line(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def json_text(payload: dict, config) -> str:
    doc = {"meta": {"config_sha256": config_hash(config), **versions()}, **payload}
    return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_all(outdir: Path, files: dict[str, str]) -> list[Path]:
    """Write every rendered file; nothing is rendered lazily, so failures happen before I/O."""
    written = []
    for name, text in files.items():
        p = Path(outdir) / name
        write_atomic(p, text)
        written.append(p)
    return written
