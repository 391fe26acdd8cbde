"""SVG plot of mean Rand index against log2(dimension). Output is byte-stable for a fixed input."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_rand_vs_dim(clustering: list, path, title: str = "") -> None:
    """``clustering`` is the list of per-(d, method) summary entries."""
    by_method = {}
    for e in clustering:
        if e["mean_rand"] is not None and e["d"]:
            by_method.setdefault(e["method"], []).append((math.log2(e["d"]), e["mean_rand"]))
    with plt.rc_context({"svg.hashsalt": "maddclust", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for method in sorted(by_method):
            pts = sorted(by_method[method])
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
        ax.set_xlabel("log2(d)")
        ax.set_ylabel("mean Rand index (0 = perfect)")
        ax.set_ylim(bottom=0)
        if title:
            ax.set_title(title)
        if by_method:
            ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
