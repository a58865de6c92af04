"""Figure rendering for the CLI report path.

Every subcommand that emits delimited data can also render a matplotlib
figure next to it.  All functions take already-computed arrays, write a PNG,
and return its path; nothing here feeds back into the numerics.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_OPTS = {"dpi": 150, "bbox_inches": "tight"}


def _finish(fig, path):
    path = Path(path)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def render_ratio_histogram(edges, density, mean_r, path):
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    centers = 0.5 * (edges[:-1] + edges[1:])
    ax.bar(centers, density, width=np.diff(edges), color="0.35", edgecolor="white")
    x = np.linspace(0, 1, 200)
    ax.plot(x, 2.0 / (1.0 + x) ** 2, label="Poisson", lw=1.2)
    ax.plot(x, (27.0 / 4.0) * (x + x**2) / (1 + x + x**2) ** 2.5, label="GOE", lw=1.2)
    ax.set_xlabel("r")
    ax.set_ylabel("P(r)")
    ax.set_xlim(0, 1)
    ax.set_title(f"mean ratio = {mean_r:.4f}")
    ax.legend(frameon=False)
    return _finish(fig, path)


def render_sweep_map(thetas, ws, grid, path):
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    mesh = ax.pcolormesh(thetas, ws, grid, shading="nearest", vmin=0.38, vmax=0.6)
    fig.colorbar(mesh, ax=ax, label="mean ratio")
    ax.set_xlabel("theta")
    ax.set_ylabel("W")
    return _finish(fig, path)


def render_sff(times, values, goe_ref, dim, tau_h, path):
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    nz = times > 0
    ax.loglog(times[nz], values[nz], lw=0.8, label="ensemble")
    if goe_ref is not None:
        ax.loglog(times[nz], goe_ref[nz], lw=1.2, ls="--", label="GOE")
    ax.axhline(dim, color="0.5", lw=0.8)
    ax.axvline(tau_h, color="0.5", lw=0.8, ls=":")
    ax.set_xlabel("m")
    ax.set_ylabel("R2(m)")
    ax.legend(frameon=False)
    return _finish(fig, path)


def render_dynamics(mean_n, path):
    """mean_n: array (m_steps+1, M)."""
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    mesh = ax.pcolormesh(np.arange(mean_n.shape[1]) + 1, np.arange(mean_n.shape[0]),
                         mean_n, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="mean photons")
    ax.set_xlabel("mode")
    ax.set_ylabel("m")
    return _finish(fig, path)


def render_probs(probs, path):
    """probs: array (m_steps+1, n_configs)."""
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    mesh = ax.pcolormesh(np.arange(probs.shape[1]), np.arange(probs.shape[0]),
                         probs, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="P")
    ax.set_xlabel("configuration index")
    ax.set_ylabel("m")
    return _finish(fig, path)


def render_otoc(times, values, permanent_values, order, path):
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.plot(times, values, lw=1.0, label=f"order-{order} correlator")
    ax.plot(times, permanent_values, lw=0.8, ls="--", label="permanent path")
    ax.set_xlabel("m")
    ax.set_ylabel("value")
    ax.set_yscale("log")
    ax.legend(frameon=False)
    return _finish(fig, path)


def render_element_histogram(edges, density, path):
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    centers = 0.5 * (edges[:-1] + edges[1:])
    ax.bar(centers, density, width=np.diff(edges), color="0.35", edgecolor="white")
    x = np.linspace(edges[0], edges[-1], 300)
    ax.plot(x, np.exp(-x**2 / 2) / np.sqrt(2 * np.pi), lw=1.2, label="standard normal")
    ax.set_xlabel("standardized element")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    return _finish(fig, path)


def render_qq(theoretical, sample, path):
    fig, ax = plt.subplots(figsize=(3.6, 3.6))
    ax.plot(theoretical, sample, ".", ms=2)
    lim = [min(theoretical.min(), sample.min()), max(theoretical.max(), sample.max())]
    ax.plot(lim, lim, lw=0.8, color="0.4")
    ax.set_xlabel("normal quantiles")
    ax.set_ylabel("sample quantiles")
    return _finish(fig, path)


def render_portrait(orbits, kick, path):
    """orbits: list of (steps+1, 2) arrays of (X, k)."""
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    for arr in orbits:
        ax.plot(arr[:, 1], arr[:, 0], ".", ms=0.5)
    ax.set_xlabel("k")
    ax.set_ylabel("X")
    ax.set_title(f"kbar = {kick:g}")
    return _finish(fig, path)
