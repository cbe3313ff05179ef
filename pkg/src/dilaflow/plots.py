"""Figure rendering for trajectories and rescaled-orbit diagnostics.

Uses the Agg backend so figures render to files in headless runs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def trajectory_figure(traj, title: str = "trajectory"):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    n = traj.points.shape[1]
    for j in range(n):
        ax1.plot(traj.times, np.abs(traj.points[:, j]), label="|z%d|" % (j + 1))
    ax1.set_xlabel("t")
    ax1.set_ylabel("modulus")
    ax1.set_title(title)
    ax1.legend()
    for j in range(n):
        ax2.plot(
            traj.points[:, j].real, traj.points[:, j].imag, label="z%d" % (j + 1)
        )
    ax2.set_xlabel("Re")
    ax2.set_ylabel("Im")
    ax2.set_title("complex plane")
    ax2.set_aspect("equal", adjustable="datalim")
    ax2.legend()
    fig.tight_layout()
    return fig


def koenigs_figure(result, title: str = "rescaled orbit"):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    n = result.samples.shape[1]
    for j in range(n):
        ax1.plot(
            result.samples[:, j].real,
            result.samples[:, j].imag,
            ".-",
            markersize=3,
            label="s%d" % (j + 1),
        )
    ax1.set_xlabel("Re")
    ax1.set_ylabel("Im")
    ax1.set_title("%s (%s)" % (title, result.verdict))
    ax1.set_aspect("equal", adjustable="datalim")
    ax1.legend()
    if len(result.diffs):
        # log scale needs a positive floor; exact-zero differences happen
        ax2.semilogy(result.times[1:], np.maximum(result.diffs, 1e-300))
    ax2.set_xlabel("t")
    ax2.set_ylabel("successive difference")
    ax2.set_title("convergence diagnostic")
    fig.tight_layout()
    return fig


def save_figure(fig, path: str) -> None:
    kwargs = {}
    if str(path).lower().endswith(".png"):
        # strip the writer tag so identical runs produce identical bytes
        kwargs["metadata"] = {"Software": None}
    fig.savefig(path, dpi=120, **kwargs)
    plt.close(fig)
