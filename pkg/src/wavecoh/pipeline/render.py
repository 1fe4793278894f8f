"""Heatmaps drawn from grid contents. Cosmetic only; grid files are the contract."""

from __future__ import annotations

import numpy as np

from ..coherence import arrow_components


def _axes(times, periods):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(10, 4.5))
    x = np.arange(len(times))
    y = np.log2(periods)
    ax.set_ylim(y[-1], y[0])  # long periods at the bottom
    ticks = np.arange(np.ceil(y[0]), np.floor(y[-1]) + 1)
    ax.set_yticks(ticks)
    ax.set_yticklabels([f"{2 ** t:g}" for t in ticks])
    ax.set_ylabel("period")
    step = max(1, len(times) // 8)
    ax.set_xticks(x[::step])
    ax.set_xticklabels([times[i] for i in x[::step]])
    return plt, fig, ax, x, y


def _finish(plt, fig, ax, x, y, coi, significant, path, title, note=""):
    if significant is not None and significant.any() and not significant.all():
        ax.contour(x, y, significant.astype(float), levels=[0.5], colors="k", linewidths=2)
    coi_y = np.log2(np.maximum(coi, 2.0 ** y[0]))
    ax.fill_between(x, coi_y, y[-1], color="white", alpha=0.5, linewidth=0)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": None, "Description": note or None})
    plt.close(fig)


def power_heatmap(path, times, periods, coi, power, significant=None, title="", note=""):
    plt, fig, ax, x, y = _axes(times, periods)
    mesh = ax.pcolormesh(x, y, np.log2(np.maximum(power, 1e-300)), shading="nearest",
                         cmap="jet")
    fig.colorbar(mesh, ax=ax, label="log2 power")
    _finish(plt, fig, ax, x, y, coi, significant, path, title, note)


def coherence_heatmap(path, times, periods, coi, r2, phase, arrow_mask, significant=None,
                      title="", arrow_step=0, note=""):
    plt, fig, ax, x, y = _axes(times, periods)
    mesh = ax.pcolormesh(x, y, r2, shading="nearest", cmap="jet", vmin=0, vmax=1)
    fig.colorbar(mesh, ax=ax, label="squared coherence")
    step_t = arrow_step or max(1, len(times) // 40)
    step_s = max(1, len(periods) // 16)
    sub = np.zeros_like(arrow_mask, dtype=bool)
    sub[::step_s, ::step_t] = True
    jj, kk = np.nonzero(arrow_mask & sub)
    if len(jj):
        u, v = arrow_components(phase[jj, kk])
        ax.quiver(x[kk], y[jj], u, v, angles="uv", pivot="middle", scale=40, width=0.002)
    _finish(plt, fig, ax, x, y, coi, significant, path, title, note)
