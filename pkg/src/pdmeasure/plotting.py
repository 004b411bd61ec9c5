"""Matplotlib renderings of the sweep tables, written next to the CSV."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> None:
    # fixed metadata keeps repeated renders identical
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_entanglement_surface(s_values, q_values, e_bits: np.ndarray, path) -> None:
    fig, (ax_map, ax_cut) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    mesh = ax_map.pcolormesh(q_values, s_values, e_bits, shading="auto", cmap="viridis", vmin=0.0, vmax=1.0)
    ax_map.set_xlabel("compression q")
    ax_map.set_ylabel("input polar angle s (rad)")
    fig.colorbar(mesh, ax=ax_map, label="E (bit)")

    idx = sorted({0, len(s_values) // 2, len(s_values) - 1})
    for i in idx:
        ax_cut.plot(q_values, e_bits[i], label=f"s = {s_values[i] / math.pi:.2f} pi")
    ax_cut.axhline(1.0, color="0.6", lw=0.8, ls=":")
    ax_cut.set_xlabel("compression q")
    ax_cut.set_ylabel("E (bit)")
    ax_cut.set_ylim(0.0, 1.05)
    ax_cut.legend(frameon=False)
    _save(fig, path)


def plot_holevo_curves(q_values, i_a, i_b, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4), constrained_layout=True)
    ax.plot(q_values, i_b, label="meter $I_B$")
    ax.plot(q_values, i_a, label="object $I_A$")
    ax.set_xlabel("compression q")
    ax.set_ylabel("Holevo information (bit)")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.05)
    ax.legend(frameon=False)
    _save(fig, path)
