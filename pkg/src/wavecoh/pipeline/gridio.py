"""Grid file reader/writer.

Layout::

    # wavecoh-grid 1
    # meta: {...json...}
    # periods: p_0 p_1 ... p_{J-1}
    # times: t_0 ... t_{N-1}
    # coi: c_0 ... c_{N-1}
    # planes: name_1 name_2 ...
    <J rows of N values for plane 1>
    <J rows of N values for plane 2>
    ...

Floats use the shortest repr that round-trips; boolean planes use 0/1.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

MAGIC = "# wavecoh-grid 1"


def _fmt(v) -> str:
    return repr(float(v))


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def grid_text(periods, times, coi, planes: dict, meta: dict | None = None) -> str:
    periods = np.asarray(periods, dtype=float)
    coi = np.asarray(coi, dtype=float)
    J, N = len(periods), len(coi)
    out = [MAGIC,
           "# meta: " + json.dumps(meta or {}, sort_keys=True, default=_json_default),
           "# periods: " + " ".join(_fmt(p) for p in periods),
           "# times: " + " ".join(str(t) for t in times),
           "# coi: " + " ".join(_fmt(c) for c in coi),
           "# planes: " + " ".join(planes)]
    for name, arr in planes.items():
        arr = np.asarray(arr)
        if arr.shape != (J, N):
            raise ValueError(f"plane {name!r} has shape {arr.shape}, expected {(J, N)}")
        if arr.dtype == bool:
            out.extend(" ".join("1" if v else "0" for v in row) for row in arr)
        else:
            out.extend(" ".join(_fmt(v) for v in row) for row in arr)
    return "\n".join(out) + "\n"


def write_grid(path, periods, times, coi, planes: dict, meta: dict | None = None) -> None:
    write_atomic(path, grid_text(periods, times, coi, planes, meta))


def read_grid(path) -> dict:
    """Parse a grid file into ``{"meta", "periods", "times", "coi", "planes"}``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MAGIC:
        raise ValueError(f"{path}: not a wavecoh grid file")
    header = {}
    i = 1
    while i < len(lines) and lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition(": ")
        header[key.rstrip(":")] = value
        i += 1
    periods = np.array(header["periods"].split(), dtype=float)
    times = header["times"].split()
    coi = np.array(header["coi"].split(), dtype=float)
    names = header["planes"].split()
    J = len(periods)
    body = lines[i:]
    if len(body) != J * len(names):
        raise ValueError(f"{path}: expected {J * len(names)} data rows, got {len(body)}")
    planes = {}
    for k, name in enumerate(names):
        rows = body[k * J:(k + 1) * J]
        arr = np.array([r.split() for r in rows], dtype=float)
        planes[name] = arr
    return {"meta": json.loads(header.get("meta", "{}")), "periods": periods,
            "times": times, "coi": coi, "planes": planes}


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"
