"""Plain-text trajectory, snapshot, and report serialization.

Trajectory files are CSV with a fixed 18-column header for a four-port
output.  Floats are written with repr so a read back is bitwise equal;
the funnel radius is the only column allowed to be infinite (written as
the literal inf).  Snapshot files carry one nodal field pair on a
structured grid: a `nx ny t` header line, then one `v u` line per node
in row-major order with x fastest.  All writes go through a temp file
in the target directory and a rename, so readers never see a partial
file.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict

import numpy as np

from .integrate import TrajectoryLog

__all__ = [
    "TRAJECTORY_HEADER",
    "FormatError",
    "write_trajectory",
    "read_trajectory",
    "write_snapshot",
    "read_snapshot",
    "report_lines",
    "reports_json",
]

TRAJECTORY_HEADER = ("t,y1,y2,y3,y4,yref1,yref2,yref3,yref4,"
                     "e_norm,funnel_radius,ise1,ise2,ise3,ise4,"
                     "v_l2,u_l2,margin")

_N_COLUMNS = 18
_RADIUS_COLUMN = 10


class FormatError(ValueError):
    """Malformed trajectory or snapshot file."""


def _fmt(x):
    # repr of a python float is the shortest digit string that round-trips
    return repr(float(x))


def _atomic_write(path, lines):
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write("\n".join(lines))
            handle.write("\n")
        # mkstemp creates 0600; published files should honor the umask
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trajectory(path, log):
    """Write a four-port TrajectoryLog as CSV."""
    if log.m != 4:
        raise FormatError(f"trajectory files carry a four-port output, "
                          f"log has {log.m}")
    if log.n_samples == 0:
        raise FormatError("refusing to write an empty trajectory")
    if not np.all(np.diff(log.t) > 0.0):
        raise FormatError("sample times must be strictly increasing")
    columns = np.column_stack([
        log.t, log.y, log.y_ref, log.e_norm, log.funnel_radius,
        log.i_se, log.v_l2, log.u_l2, log.margin])
    finite = np.isfinite(columns)
    finite[:, _RADIUS_COLUMN] |= np.isposinf(columns[:, _RADIUS_COLUMN])
    if not np.all(finite):
        raise FormatError("non-finite value outside the funnel_radius "
                          "column")
    lines = [TRAJECTORY_HEADER]
    for row in columns:
        lines.append(",".join(_fmt(x) for x in row))
    _atomic_write(path, lines)


def read_trajectory(path):
    """Read a trajectory CSV back into a TrajectoryLog."""
    with open(path, "r", newline="") as handle:
        text = handle.read()
    lines = text.splitlines()
    if not lines or lines[0] != TRAJECTORY_HEADER:
        raise FormatError(f"{path}: bad or missing header")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != _N_COLUMNS:
            raise FormatError(f"{path}:{lineno}: expected {_N_COLUMNS} "
                              f"columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FormatError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    finite = np.isfinite(data)
    finite[:, _RADIUS_COLUMN] |= np.isposinf(data[:, _RADIUS_COLUMN])
    if not np.all(finite):
        raise FormatError(f"{path}: non-finite value outside the "
                          f"funnel_radius column")
    t = data[:, 0]
    if not np.all(np.diff(t) > 0.0):
        raise FormatError(f"{path}: sample times must be strictly "
                          f"increasing")
    return TrajectoryLog(
        t=t,
        y=data[:, 1:5],
        y_ref=data[:, 5:9],
        e_norm=data[:, 9],
        funnel_radius=data[:, 10],
        i_se=data[:, 11:15],
        v_l2=data[:, 15],
        u_l2=data[:, 16],
        margin=data[:, 17])


def write_snapshot(path, nx, ny, t, v, u):
    """Write one nodal (v, u) field pair on an (nx, ny) grid."""
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise FormatError("grid must have at least one cell per axis")
    n = (nx + 1) * (ny + 1)
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape != (n,) or u.shape != (n,):
        raise FormatError(f"fields must have {n} nodal values")
    if not (math.isfinite(t) and np.all(np.isfinite(v))
            and np.all(np.isfinite(u))):
        raise FormatError("snapshot values must be finite")
    lines = [f"{nx} {ny} {_fmt(t)}"]
    for vi, ui in zip(v, u):
        lines.append(f"{_fmt(vi)} {_fmt(ui)}")
    _atomic_write(path, lines)


def read_snapshot(path):
    """Read a snapshot file, returning (nx, ny, t, v, u)."""
    with open(path, "r", newline="") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 3:
        raise FormatError(f"{path}: header must be 'nx ny t'")
    try:
        nx, ny, t = int(head[0]), int(head[1]), float(head[2])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if nx < 1 or ny < 1:
        raise FormatError(f"{path}: grid must have at least one cell "
                          f"per axis")
    n = (nx + 1) * (ny + 1)
    body = [line for line in lines[1:] if line]
    if len(body) != n:
        raise FormatError(f"{path}: expected {n} node lines, got "
                          f"{len(body)}")
    v = np.empty(n)
    u = np.empty(n)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"{path}:{i + 2}: expected 'v u'")
        try:
            v[i], u[i] = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise FormatError(f"{path}:{i + 2}: {exc}") from None
    if not (math.isfinite(t) and np.all(np.isfinite(v))
            and np.all(np.isfinite(u))):
        raise FormatError(f"{path}: snapshot values must be finite")
    return nx, ny, t, v, u


def report_lines(reports):
    """One human-readable line per report."""
    return [str(r) for r in reports]


def reports_json(reports):
    """JSON document for a report list."""
    return json.dumps([asdict(r) for r in reports], indent=2)
