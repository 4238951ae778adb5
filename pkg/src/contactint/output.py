"""CSV / JSONL writers for trajectories and report tables.

Numbers are written with 17 significant digits through ``format`` (never
``locale``), so files round-trip doubles exactly.  Trajectory CSV files use
the header ``t,q1..qn,p1..pn,s,H`` followed by optional extra columns, and end
with ``#``-prefixed ``key=value`` metadata lines.  JSONL files hold one object
per sample with the same field names and a final ``{"metadata": {...}}``
record.
"""

from __future__ import annotations

import contextlib
import json
import sys

import numpy as np

from .core import hamiltonian_raw

__all__ = [
    "trajectory_columns",
    "trajectory_table",
    "trajectory_metadata",
    "write_trajectory",
    "write_table",
    "read_trajectory_csv",
]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def trajectory_columns(n: int, extra=()) -> list:
    return ["t", *(f"q{i + 1}" for i in range(n)), *(f"p{i + 1}" for i in range(n)), "s", "H", *extra]


def trajectory_table(traj, model, extra=None) -> tuple:
    """``(columns, rows)`` with the contact Hamiltonian evaluated per sample."""
    extra = extra or {}
    n = traj.q.shape[1]
    H = np.array([hamiltonian_raw(model, traj.q[k], traj.p[k], traj.s[k], traj.t[k]) for k in range(len(traj))])
    data = np.column_stack([traj.t, traj.q, traj.p, traj.s, H, *(np.asarray(v) for v in extra.values())])
    return trajectory_columns(n, tuple(extra)), data


def trajectory_metadata(traj, wall_time=None) -> dict:
    meta = {
        "method": traj.method.name if traj.method is not None else "",
        "tau": traj.tau,
        "status": traj.status.value,
        "t_fail": "" if traj.t_fail is None else traj.t_fail,
        "failed_submap": traj.failed_submap or "",
        "message": traj.message,
        "steps": traj.steps,
    }
    meta.update(traj.counters.as_dict())
    meta["wall_time_s"] = traj.wall_time if wall_time is None else wall_time
    return meta


@contextlib.contextmanager
def _open(target):
    if target is None or target == "-":
        yield sys.stdout
    elif hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            yield fh


def write_trajectory(target, traj, model, fmt="csv", extra=None, metadata=None):
    """Write samples plus a trailing metadata record to a path, file or stdout."""
    columns, data = trajectory_table(traj, model, extra)
    meta = trajectory_metadata(traj)
    meta.update(metadata or {})
    with _open(target) as fh:
        if fmt == "csv":
            fh.write(",".join(columns) + "\n")
            for row in data:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
            for key, value in meta.items():
                value = _fmt(value) if isinstance(value, (float, np.floating)) else str(value)
                fh.write(f"# {key}={value}\n")
        elif fmt == "jsonl":
            for row in data:
                fh.write(json.dumps(dict(zip(columns, map(float, row)))) + "\n")
            fh.write(json.dumps({"metadata": meta}) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")


def write_table(target, columns, rows, fmt="csv"):
    """Write a generic report table (values may be numbers or strings)."""
    with _open(target) as fh:
        if fmt == "csv":
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) if isinstance(v, (int, float, np.number)) else str(v) for v in row) + "\n")
        elif fmt == "jsonl":
            for row in rows:
                fh.write(json.dumps(dict(zip(columns, row)), default=float) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")


def read_trajectory_csv(path):
    """Read a trajectory CSV back: returns ``(columns, data, metadata)``."""
    columns, rows, meta = None, [], {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append([float(x) for x in line.split(",")])
    return columns, np.array(rows), meta
