"""Figure rendering for divergence tables and certificate reports.

Rendering is file-based (Agg backend): each function writes a PNG next to the
delimited output and returns the path.  The order axis is squashed by
a -> a/(1+a) so the whole range [0, inf] fits, with infinity pinned at 1.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .certify import CertReport

_TICK_ORDERS = (0.0, 0.5, 1.0, 2.0, 4.0, 16.0, 64.0, math.inf)


def _squash(alpha: float) -> float:
    if math.isinf(alpha):
        return 1.0
    return alpha / (1.0 + alpha)


def _order_axis(ax) -> None:
    ax.set_xlim(0.0, 1.0)
    ax.set_xticks([_squash(a) for a in _TICK_ORDERS])
    ax.set_xticklabels(
        ["inf" if math.isinf(a) else f"{a:g}" for a in _TICK_ORDERS]
    )
    ax.set_xlabel("order")


def divergence_figure(alphas, series: dict[str, np.ndarray], path: str) -> str:
    """Plot divergence values against the squashed order axis.

    Infinite values are dropped pointwise (they would dominate the scale);
    fully infinite series appear as empty legend entries.
    """
    xs = np.array([_squash(float(a)) for a in alphas])
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name, values in series.items():
        ys = np.asarray(values, dtype=float)
        finite = np.isfinite(ys)
        ax.plot(xs[finite], ys[finite], marker=".", label=name)
    _order_axis(ax)
    ax.set_ylabel("divergence (nats)")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def margin_figure(report: CertReport, path: str) -> str:
    """Plot every check's margin in report order, colored by sign.

    Positive bars support the conversion, negative bars refute it, and the
    tie band around zero marks the inconclusive zone.
    """
    margins = np.array([c.margin for c in report.checks])
    clip = 1e6
    margins = np.clip(margins, -clip, clip)
    colors = np.where(margins >= 0, "tab:blue", "tab:red")
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.bar(np.arange(len(margins)), margins, color=colors, width=0.8)
    ax.axhline(0.0, color="black", linewidth=0.8)
    tol = report.grid.tie_tol
    ax.axhspan(-tol, tol, color="gray", alpha=0.3)
    ax.set_xlabel("check index")
    ax.set_ylabel("margin")
    ax.set_title(f"{report.regime.value}: {report.verdict.value}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
