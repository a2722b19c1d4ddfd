"""Figure rendering for CLI reports.

Everything here draws to a file via the Agg backend; nothing opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .linalg import PointSet  # noqa: E402

METHOD_STYLES = {
    "cpca": dict(color="tab:blue", marker="o"),
    "lpca": dict(color="tab:orange", marker="s"),
    "mle": dict(color="tab:green", marker="^"),
}


def save_sweep_plot(rows, path: str, title: str = "") -> None:
    """Plot estimate vs neighborhood size, one line per method.

    ``rows`` is an iterable of (k, method, estimate) with estimate possibly
    None (skipped).
    """
    by_method: dict[str, list[tuple[int, float]]] = {}
    for k, method, estimate in rows:
        if estimate is None:
            continue
        by_method.setdefault(method, []).append((k, estimate))

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for method, pairs in by_method.items():
        pairs.sort()
        ks = [p[0] for p in pairs]
        vals = [p[1] for p in pairs]
        ax.plot(ks, vals, label=method, markersize=4,
                **METHOD_STYLES.get(method, {}))
    ax.set_xlabel("neighborhood size k")
    ax.set_ylabel("estimated dimension")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_spectrum_plot(aggregated, noise_var: float, path: str, title: str = "") -> None:
    """Bar chart of an aggregated eigenvalue spectrum with the noise level marked."""
    values = np.asarray(aggregated, dtype=float)
    idx = np.arange(1, values.size + 1)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar(idx, values, color="tab:blue", alpha=0.8, label="aggregated variance")
    if noise_var > 0:
        ax.axhline(noise_var, color="tab:red", linestyle="--",
                   label=f"noise variance {noise_var:.3g}")
    ax.set_xlabel("principal direction")
    ax.set_ylabel("variance")
    ax.set_xticks(idx)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_scatter_plot(points: PointSet, path: str, title: str = "") -> None:
    """Scatter of the first two or three coordinates of a point set."""
    pts = points.points
    if points.dim >= 3:
        fig = plt.figure(figsize=(6.4, 5.2))
        ax = fig.add_subplot(projection="3d")
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=4, alpha=0.6)
        ax.set_zlabel("x3")
    else:
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        ys = pts[:, 1] if points.dim > 1 else np.zeros(points.n)
        ax.scatter(pts[:, 0], ys, s=4, alpha=0.6)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
