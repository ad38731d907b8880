"""Figures written next to the CSV output. Uses the non-interactive backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_AXES = ("x", "y", "z")


def plot_tracking(log, path) -> Path:
    """Reference against actual position, one panel per axis."""
    fig, axs = plt.subplots(3, 1, sharex=True, figsize=(8, 7))
    for i, ax in enumerate(axs):
        ax.plot(log.t, log.reference[:, i], "k--", lw=1.0, label="reference")
        ax.plot(log.t, log.position[:, i], lw=1.2, label="actual")
        ax.set_ylabel(f"{_AXES[i]} (m)")
        ax.grid(alpha=0.3)
    axs[0].legend(loc="best")
    axs[0].set_title(f"{log.name}: {log.controller}, payload {'on' if log.payload else 'off'}")
    axs[-1].set_xlabel("t (s)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def plot_errors(log, path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 3.5))
    err = log.position - log.reference
    for i in range(3):
        ax.plot(log.t, err[:, i], lw=1.0, label=_AXES[i])
    ax.set_xlabel("t (s)")
    ax.set_ylabel("error (m)")
    ax.grid(alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def plot_arm(log, path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 3.5))
    for i in range(3):
        ax.plot(log.t, log.arm_q[:, i], lw=1.0, label=f"q{i + 1}")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("joint angle (rad)")
    ax.grid(alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def render_report(log, stem) -> list[Path]:
    """All figures for one log, named ``<stem>_<kind>.png``."""
    stem = Path(stem)
    return [
        plot_tracking(log, stem.with_name(stem.name + "_tracking.png")),
        plot_errors(log, stem.with_name(stem.name + "_errors.png")),
        plot_arm(log, stem.with_name(stem.name + "_arm.png")),
    ]
