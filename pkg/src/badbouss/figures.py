"""Report figures rendered next to the CSV outputs (Agg backend, PNG files)."""

from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    plt.rcParams.update({
        "figure.dpi": 130,
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.25,
        "lines.linewidth": 1.1,
    })
    return plt


def snapshots_figure(path, times, xs, profiles, reference=None, title="U(x, t)"):
    """Panel grid of solution snapshots, optionally with a dashed reference."""
    plt = _plt()
    n = len(times)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.2 * ncols, 2.6 * nrows), squeeze=False
    )
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    for i, (t, u) in enumerate(zip(times, profiles)):
        ax = axes.flat[i]
        ax.plot(xs, u, color="tab:blue")
        if reference is not None:
            ax.plot(xs, reference[i], "k--", linewidth=0.9)
        ax.set_title(f"t = {t:g}", fontsize=9)
        ax.set_xlabel("x")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def error_figure(path, times, errors):
    """e(t) together with its (t/ln t) and sqrt(t) scalings."""
    plt = _plt()
    fig, axes = plt.subplots(1, 3, figsize=(11, 2.9))
    axes[0].plot(times, errors)
    axes[0].set_title("e(t)")
    tl = np.where(times > 1.0, times / np.log(np.maximum(times, 1.0 + 1e-12)), np.nan)
    axes[1].plot(times, tl * errors)
    axes[1].set_title("t/ln(t) * e(t)")
    axes[2].plot(times, np.sqrt(times) * errors)
    axes[2].set_title("sqrt(t) * e(t)")
    for ax in axes:
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def damping_figure(path, modes, values):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(4.6, 2.8))
    ax.plot(modes, values)
    ax.set_xlabel("mode j")
    ax.set_ylabel("d(j)")
    ax.set_title("damping profile")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def scattering_figure(path, ks, s11, r1=None):
    """|s_11| (and r_1 when available) along the sampled k set."""
    plt = _plt()
    ks = np.asarray(ks)
    x = ks.real if np.allclose(ks.imag, 0) else np.angle(ks)
    xlabel = "k" if np.allclose(ks.imag, 0) else "arg k"
    n = 2 if r1 is not None else 1
    fig, axes = plt.subplots(1, n, figsize=(4.6 * n, 2.9), squeeze=False)
    ax = axes[0, 0]
    ax.plot(x, np.real(s11), label="Re")
    ax.plot(x, np.imag(s11), label="Im")
    ax.axhline(0.0, color="k", linewidth=0.6)
    ax.set_title("s_11(k)")
    ax.set_xlabel(xlabel)
    ax.legend(fontsize=8)
    if r1 is not None:
        ax = axes[0, 1]
        ax.plot(x, np.abs(r1))
        ax.set_title("|r_1(k)|")
        ax.set_xlabel(xlabel)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def asymptotics_figure(path, zetas, A2, shifts_left=None, shifts_right=None):
    plt = _plt()
    n = 2 if shifts_left is not None else 1
    fig, axes = plt.subplots(1, n, figsize=(4.6 * n, 2.9), squeeze=False)
    axes[0, 0].plot(zetas, A2)
    axes[0, 0].set_title("A_2(zeta)")
    axes[0, 0].set_xlabel("zeta")
    if shifts_left is not None:
        ax = axes[0, 1]
        ax.plot(zetas, shifts_left, label="left-moving")
        if shifts_right is not None:
            ax.plot(zetas, shifts_right, label="right-moving")
        ax.set_title("phase shifts")
        ax.set_xlabel("zeta")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
