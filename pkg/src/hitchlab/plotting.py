"""Figure rendering for the report paths (headless, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 3.8),
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.35,
        "lines.linewidth": 1.2,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
    }
)


def line_plot(path, x, series, xlabel="", ylabel="", title="", semilogy=False):
    """Write a simple multi-series line plot to ``path``.

    ``series`` is a list of (label, y-array[, style]) tuples.
    """
    fig, ax = plt.subplots()
    for item in series:
        label, y = item[0], item[1]
        style = item[2] if len(item) > 2 else "-"
        ax.plot(x, y, style, label=label)
    if semilogy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False)
    fig.savefig(path)
    plt.close(fig)
    return path


def path_plot(path, cycles_points, zeros, title=""):
    """Plot integration cycles (lists of complex samples) and marked zeros."""
    fig, ax = plt.subplots(figsize=(4.6, 4.6))
    for label, pts in cycles_points:
        ax.plot([z.real for z in pts], [z.imag for z in pts], label=label)
    if zeros:
        ax.plot(
            [complex(p).real for p, _ in zeros],
            [complex(p).imag for p, _ in zeros],
            "kx",
            markersize=8,
            label="zeros",
        )
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=7)
    fig.savefig(path)
    plt.close(fig)
    return path
