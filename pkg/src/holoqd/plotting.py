"""Optional PNG renderings of the CSV outputs (matplotlib, headless)."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_trace_csv(csv_path, png_path=None) -> Path:
    """Populations against time, with the phase column underneath if present."""
    from .io import read_csv

    header, rows = read_csv(csv_path)
    data = np.array([[float(x) if x else np.nan for x in r] for r in rows])
    t = data[:, 0]
    pcols = [k for k, h in enumerate(header) if h.startswith("P(")]
    phase = [k for k, h in enumerate(header) if h.startswith("phase(")]
    plt = _pyplot()
    nrows = 2 if phase else 1
    fig, axes = plt.subplots(nrows, 1, figsize=(7, 3 + 2 * nrows), sharex=True, squeeze=False)
    ax = axes[0, 0]
    for k in pcols:
        ax.plot(t, data[:, k], label=header[k])
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best", fontsize=8)
    if phase:
        axes[1, 0].plot(t, data[:, phase[0]], ".", ms=1)
        axes[1, 0].set_ylabel(header[phase[0]] + " (rad)")
    axes[-1, 0].set_xlabel("t (fs)")
    fig.tight_layout()
    png_path = Path(png_path or Path(csv_path).with_suffix(".png"))
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path


def plot_scan_csv(csv_path, png_path=None) -> Path:
    """Leakage and infidelity against Omega T on log axes."""
    from .io import read_csv

    header, rows = read_csv(csv_path)
    data = np.array([[float(x) for x in r] for r in rows])
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for k in range(1, data.shape[1]):
        ax.loglog(data[:, 0], np.maximum(data[:, k], 1e-16), "o-", label=header[k])
    ax.set_xlabel(header[0])
    ax.legend()
    fig.tight_layout()
    png_path = Path(png_path or Path(csv_path).with_suffix(".png"))
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path
