from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch


def rms_error(actual, reference) -> np.ndarray:
    """Per-axis root-mean-square of ``actual - reference``."""
    a = np.asarray(actual, dtype=float)
    r = np.asarray(reference, dtype=float)
    if a.shape != r.shape:
        raise LengthMismatch(f"series shapes differ: {a.shape} vs {r.shape}")
    if a.shape[0] == 0:
        raise LengthMismatch("cannot take the RMS of an empty series")
    return np.sqrt(np.mean(np.square(a - r), axis=0))


def quantize(values, digits: int = 9) -> np.ndarray:
    """Round to ``digits`` significant digits, as printed in the CSV log."""
    v = np.asarray(values, dtype=float)
    return np.char.mod(f"%.{digits}g", v).astype(float)


@dataclass(frozen=True)
class RmsReport:
    x: float
    y: float
    z: float
    payload: bool
    controller: str
    name: str = ""

    def __post_init__(self):
        if min(self.x, self.y, self.z) < 0.0:
            raise ValueError("RMS values are non-negative")

    @classmethod
    def from_log(cls, log) -> "RmsReport":
        """Report over the full mission, computed on the logged precision."""
        x, y, z = rms_error(quantize(log.position), quantize(log.reference))
        return cls(float(x), float(y), float(z), bool(log.payload), log.controller, log.name)

    def as_row(self) -> list[str]:
        return [self.name, self.controller, "on" if self.payload else "off",
                f"{self.x:.6f}", f"{self.y:.6f}", f"{self.z:.6f}"]

    HEADER = ("scenario", "controller", "payload", "rms_x", "rms_y", "rms_z")

    def text(self) -> str:
        return "\n".join(",".join(r) for r in (self.HEADER, self.as_row())) + "\n"
