"""Figure rendering for the report paths of the CLI.

Every subcommand that writes a delimited table can also render a
matplotlib figure of it next to the CSV.  The figures are diagnostic,
not the interchange format; the CSV stays the source of truth.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _new_axes(xlabel, ylabel, title):
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_records(records, horizon, title, path) -> None:
    """Step plot of record values against q on log-log axes."""
    qs = [r.q for r in records]
    vals = [r.value for r in records]
    fig, ax = _new_axes("q", "record value", title)
    pos = [(q, v) for q, v in zip(qs, vals) if v > 0]
    if pos:
        ax.loglog([q for q, _ in pos] + [horizon],
                  [v for _, v in pos] + [pos[-1][1]],
                  drawstyle="steps-post", marker="o")
    zeros = [q for q, v in zip(qs, vals) if v == 0]
    for q in zeros:
        ax.axvline(q, color="red", linestyle="--", alpha=0.6)
        ax.annotate("hit 0", (q, ax.get_ylim()[0] if pos else 1.0),
                    color="red", fontsize=8)
    _save(fig, path)


def plot_profile(cells, title, path) -> None:
    """Heat map of heights over the (t, n) cone grid."""
    ts = sorted({c.t for c in cells})
    ns = sorted({c.n for c in cells})
    ti = {t: i for i, t in enumerate(ts)}
    ni = {n: i for i, n in enumerate(ns)}
    grid = np.full((len(ns), len(ts)), np.nan)
    for c in cells:
        grid[ni[c.n], ti[c.t]] = c.height
    fig, ax = _new_axes("t", "n", title)
    extent = [min(ts), max(ts) if len(ts) > 1 else min(ts) + 1,
              min(ns) - 0.5, max(ns) + 0.5]
    im = ax.imshow(grid, origin="lower", aspect="auto", extent=extent,
                   interpolation="nearest", cmap="viridis")
    fig.colorbar(im, ax=ax, label="height")
    _save(fig, path)


def plot_boxdim(fit, title, path) -> None:
    """log-log separated counts with the fitted slope line."""
    xs = [abs(math.log(d)) for d in fit.ladder]
    ys = [math.log(c) for c in fit.counts]
    fig, ax = _new_axes("|log delta|", "log s_delta", title)
    ax.plot(xs, ys, "o", label="counts")
    ax.plot(xs, [fit.slope * x + fit.intercept for x in xs], "-",
            label=f"slope {fit.slope:.4f}")
    ax.legend()
    _save(fig, path)


def plot_exceptional(us, mins, delta, title, path) -> None:
    """Scatter of per-u product minima against the survivor threshold."""
    fig, ax = _new_axes("u", "min product (clipped)", title)
    mn = np.asarray(mins)
    ax.semilogy(us, np.maximum(mn, 1e-300), ",", alpha=0.7)
    ax.axhline(delta, color="red", linestyle="--", label=f"delta={delta}")
    ax.legend()
    _save(fig, path)


def plot_quotients(ks, sups, title, path) -> None:
    """Per-scaling maximum partial quotient."""
    fig, ax = _new_axes("k (power of p)", "max partial quotient", title)
    ax.plot(ks, sups, "o-")
    _save(fig, path)
