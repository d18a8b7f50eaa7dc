#!/usr/bin/env python3

"""SVG figures for the command outputs. Plots are never read back."""

import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

logger = logging.getLogger(__name__)

matplotlib.rcParams["svg.hashsalt"] = "darkladder"
SVG_METADATA = {"Date": None}


def _save(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata=SVG_METADATA)
    plt.close(fig)
    logger.debug("plot %s", path)
    return path


def heatmap(path, x, y, values, xlabel, ylabel, title="", log_floor=None, curves=(), points=None):
    """Colour map of values[i, j] over (x[i], y[j]) with optional overlaid curves.

    With `log_floor` the colour scale is log10, clipped at log_floor * max.
    `curves` is an iterable of (x, y) arrays; `points` an (N, 2) array.
    """
    z = np.asarray(values, dtype=float).T
    label = "value"
    if log_floor is not None:
        top = np.nanmax(z) if np.isfinite(z).any() else 1.0
        z = np.log10(np.clip(z, log_floor * top, None))
        label = "log10 value"
    fig = plt.figure(figsize=(6, 4.5))
    ax = plt.gca()
    mesh = ax.pcolormesh(x, y, z, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=label)
    for cx, cy in curves:
        ax.plot(cx, cy, color="tab:blue", lw=1.0)
    if points is not None and len(points):
        pts = np.asarray(points)
        ax.plot(pts[:, 0], pts[:, 1], "w.", ms=3)
    ax.set_xlim(np.min(x), np.max(x))
    ax.set_ylim(np.min(y), np.max(y))
    plt.xlabel(xlabel)
    plt.ylabel(ylabel)
    plt.title(title)
    return _save(fig, path)


def line_plot(path, series, xlabel, ylabel, title="", logy=False):
    """`series` is a list of (label, x, y[, style])."""
    fig = plt.figure(figsize=(6, 4))
    for item in series:
        label, x, y = item[:3]
        style = item[3] if len(item) > 3 else "-"
        plt.plot(x, y, style, label=label)
    if logy:
        plt.yscale("log")
    plt.xlabel(xlabel)
    plt.ylabel(ylabel)
    plt.title(title)
    if any(s[0] for s in series):
        plt.legend()
    return _save(fig, path)


def bar_chart(path, labels, groups, xlabel, ylabel, title="", logy=True):
    """Grouped bars: `groups` maps a legend label to one height per entry of `labels`."""
    fig = plt.figure(figsize=(6, 4))
    x = np.arange(len(labels))
    width = 0.8 / max(len(groups), 1)
    for k, (name, heights) in enumerate(groups.items()):
        plt.bar(x + (k - (len(groups) - 1) / 2) * width, heights, width, label=name)
    ax = plt.gca()
    ax.set_xticks(x)
    ax.set_xticklabels([str(l) for l in labels])
    if logy:
        plt.yscale("log")
    plt.xlabel(xlabel)
    plt.ylabel(ylabel)
    plt.title(title)
    plt.legend()
    return _save(fig, path)


def histogram(path, histograms, xlabel="detected photons", ylabel="probability", title=""):
    """`histograms` maps a label to a {count: frequency} dict, drawn normalized."""
    fig = plt.figure(figsize=(6, 4))
    width = 0.8 / max(len(histograms), 1)
    for k, (name, hist) in enumerate(histograms.items()):
        counts = np.array(sorted(hist))
        freq = np.array([hist[c] for c in counts], dtype=float)
        plt.bar(counts + (k - (len(histograms) - 1) / 2) * width, freq / freq.sum(), width, label=name)
    plt.xlabel(xlabel)
    plt.ylabel(ylabel)
    plt.title(title)
    plt.legend()
    return _save(fig, path)
