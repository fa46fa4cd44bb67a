"""Static figures of sweep results, written next to the data files."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

AXIS_LABELS = {
    "theta": r"$\theta$ (rad)",
    "flux_tau0": r"$\tau_0$",
    "flux_tau1": r"$\tau_1$",
    "eccentricity_a": r"$a$",
    "eccentricity_b": r"$b$",
    "single_point": "sweep parameter",
}


def plot_sweep(rows, path, kind="theta", title=None, component="TM_z"):
    """One line per (p, alpha) of ``component`` against the sweep parameter."""
    series = defaultdict(list)
    for row in rows:
        if row.error or row.alpha is None:
            continue
        series[(row.p, row.alpha)].append((row.sweep_param, getattr(row, component)))

    fig, ax = plt.subplots(figsize=(6, 4))
    for (p, alpha), pts in sorted(series.items()):
        x, y = np.array(pts).T
        ax.plot(x, y, lw=1.2, label=rf"$p={p},\ \alpha={alpha}$")
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel(AXIS_LABELS.get(kind, kind))
    ax.set_ylabel(r"$T_{M,z}$  ($e\hbar R/m_e$)" if component == "TM_z" else component)
    if kind == "theta":
        ax.set_xticks(np.arange(5) * np.pi / 2)
        ax.set_xticklabels(["0", r"$\pi/2$", r"$\pi$", r"$3\pi/2$", r"$2\pi$"])
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(fontsize=7, ncol=2, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
