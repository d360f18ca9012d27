"""PNG figures for the CLI report paths (matplotlib, Agg backend)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_METADATA = {"Software": None}


def _figure(width: float = 6.0, height: float | None = None):
    golden = (math.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def _save(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_METADATA)
    plt.close(fig)
    return str(path)


def plot_degree_distribution(probs, path, empirical=None, title: str = "degree distribution") -> str:
    fig, ax = _figure()
    k = np.arange(len(probs))
    ax.bar(k, probs, width=0.8, color="0.7", label="pgf coefficients")
    if empirical is not None:
        emp = np.asarray(empirical)
        ax.plot(np.arange(len(emp)), emp, "o", ms=3, color="k", label="sampled")
        ax.legend(frameon=False)
    ax.set_xlabel("degree k")
    ax.set_ylabel("P(Y = k)")
    ax.set_title(title)
    return _save(fig, path)


def plot_prime_densities(rows, path) -> str:
    s = np.array([r["s"] for r in rows])
    fig, ax = _figure()
    ax.plot(s, [r["prime_density"] for r in rows], "k-", label=r"$\nu(P)$")
    ax.plot(s, [r["edge_density"] for r in rows], "k--", label=r"$(\nu\times\nu)(A)$")
    ax.set_xlabel("s")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_graphons(grid, panels: dict, path) -> str:
    """Side-by-side heat maps of kernels sampled on a common grid."""
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False)
    vmax = max(float(np.max(v)) for v in panels.values())
    for ax, (name, vals) in zip(axes[0], panels.items()):
        im = ax.imshow(np.asarray(vals).T, origin="lower", extent=(grid[0], grid[-1], grid[0], grid[-1]),
                       vmin=0.0, vmax=vmax, cmap="viridis")
        ax.set_title(name)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    fig.colorbar(im, ax=axes[0].tolist(), shrink=0.8)
    fig.savefig(path, dpi=120, metadata=_METADATA)
    plt.close(fig)
    return str(path)


def plot_trace(logliks, path, ylabel: str = "pseudo-log-likelihood") -> str:
    fig, ax = _figure()
    vals = np.asarray(logliks, dtype=float)
    ax.plot(vals, color="0.5", lw=1, label="chain")
    ax.plot(np.maximum.accumulate(vals), "k-", lw=1.5, label="best so far")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_series(x, series: dict, path, xlabel: str, ylabel: str, logy: bool = False) -> str:
    fig, ax = _figure()
    styles = ["k-", "k--", "k:", "k-."]
    for style, (name, y) in zip(styles * 4, series.items()):
        ax.plot(x, y, style, label=name)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(frameon=False)
    return _save(fig, path)


def plot_adjacency(adj, path, title: str = "") -> str:
    fig, ax = _figure(4.5, 4.5)
    ax.imshow(np.asarray(adj) > 0, cmap="Greys", interpolation="nearest")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    return _save(fig, path)
