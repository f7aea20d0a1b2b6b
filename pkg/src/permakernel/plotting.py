"""Figure rendering for experiment reports. All figures go straight to files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_rmse_curves(path, m_values, series: dict) -> None:
    """Log-scale error curves over training set sizes, one line per kernel."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for name, values in series.items():
        ax.semilogy(m_values, values, marker="o", markersize=3, label=name)
    ax.set_xlabel("number of data points m")
    ax.set_ylabel("RMSE")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def save_heatmap_panels(path, panels, titles, extent, ncols=None) -> None:
    """Grid of square heatmaps sharing one symmetric color scale."""
    n = len(panels)
    ncols = ncols or n
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(2.6 * ncols, 2.6 * nrows))
    axes = np.atleast_1d(axes).ravel()
    peak = max(float(np.abs(p).max()) for p in panels) or 1.0
    image = None
    for ax, panel, title in zip(axes, panels, titles):
        image = ax.imshow(
            panel.T,
            origin="lower",
            extent=extent,
            cmap="RdBu_r",
            vmin=-peak,
            vmax=peak,
        )
        ax.set_title(title, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    for ax in axes[n:]:
        ax.axis("off")
    fig.colorbar(image, ax=list(axes[:n]), shrink=0.85)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def save_eigenvalue_convergence(path, m_values, means, stds, references) -> None:
    """Computed eigenvalues against sample count with analytic reference lines."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    means = np.asarray(means)
    stds = np.asarray(stds)
    for idx in range(means.shape[1]):
        (line,) = ax.plot(m_values, means[:, idx], marker="o", markersize=3)
        ax.fill_between(
            m_values,
            means[:, idx] - stds[:, idx],
            means[:, idx] + stds[:, idx],
            alpha=0.2,
            color=line.get_color(),
        )
        ax.axhline(references[idx], linestyle="--", linewidth=0.8, color=line.get_color())
    ax.set_xlabel("number of data points m")
    ax.set_ylabel("eigenvalue")
    ax.grid(True, alpha=0.3)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def save_score_scatter(path, scores, groups=None) -> None:
    """First two principal component scores, colored by group when given."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    scores = np.asarray(scores)
    second = scores[:, 1] if scores.shape[1] > 1 else np.zeros(scores.shape[0])
    ax.scatter(scores[:, 0], second, c=groups, cmap="tab20", s=18)
    ax.set_xlabel("first principal component")
    ax.set_ylabel("second principal component")
    ax.grid(True, alpha=0.3)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def save_error_band(path, sigmas, rows) -> None:
    """Median error against bandwidth with a 30th-70th percentile band.

    ``rows`` maps a metric name to (median, p30, p70) arrays over sigmas.
    """
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    positions = np.arange(len(sigmas))
    for name, (median, p30, p70) in rows.items():
        (line,) = ax.plot(positions, median, marker="o", markersize=3, label=name)
        ax.fill_between(positions, p30, p70, alpha=0.2, color=line.get_color())
    ax.set_xticks(positions)
    ax.set_xticklabels([str(s) for s in sigmas], rotation=45, fontsize=8)
    ax.set_xlabel("bandwidth")
    ax.set_ylabel("error")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
