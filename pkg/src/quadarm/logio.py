"""CSV logs: header row, then one row per sample, 9 significant digits."""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path

import numpy as np

from .sim import SimLog

COLUMNS = ("t", "ref_x", "ref_y", "ref_z", "pos_x", "pos_y", "pos_z", "yaw_ref", "yaw",
           "thrust1", "thrust2", "thrust3", "thrust4", "arm_q1", "arm_q2", "arm_q3",
           "payload_attached")


# file stem written by the ``run`` command: <scenario>_<controller>_payload-<on|off>
_STEM = re.compile(r"^(?P<name>.+)_(?P<ctrl>pid|mrac)_payload-(?P<pl>on|off)$")


def log_table(log: SimLog) -> np.ndarray:
    return np.column_stack([
        log.t, log.reference, log.position, log.yaw_reference, log.attitude[:, 2],
        log.thrusts, log.arm_q, log.payload_attached.astype(float),
    ]) if len(log) else np.zeros((0, len(COLUMNS)))


def format_log(log: SimLog) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    data = log_table(log)
    if len(data):
        np.savetxt(buf, data, fmt="%.9g", delimiter=",")
    return buf.getvalue()


def write_log_csv(log: SimLog, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_log(log))


def read_log_csv(path) -> SimLog:
    """Parse a log written by :func:`write_log_csv` back into a :class:`SimLog`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != COLUMNS:
            raise ValueError(f"{path}: not a simulation log (unexpected header)")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, len(COLUMNS))
    n = len(data)
    attitude = np.zeros((n, 3))
    attitude[:, 2] = data[:, 8]
    payload = data[:, 16] > 0.5
    stem = Path(path).stem
    m = _STEM.match(stem)
    name, controller, flag = (m["name"], m["ctrl"], m["pl"] == "on") if m else \
        (stem, "unknown", bool(payload.any()))
    return SimLog(
        t=data[:, 0], reference=data[:, 1:4], position=data[:, 4:7], yaw_reference=data[:, 7],
        attitude=attitude, thrusts=data[:, 9:13], arm_q=data[:, 13:16],
        payload_attached=payload, setpoints=np.zeros((n, 3)),
        controller=controller, payload=flag, name=name,
    )
