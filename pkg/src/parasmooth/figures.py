"""Figure rendering for run reports.

Every run can emit three PNGs next to its delimited series output: the
seminorm ladder on log-log axes (with fitted power laws overlaid when rate
fits ran), the weighted energies against time, and shell-averaged spectral
profiles at the first and last sample.  Rendering is headless and file-only.
A module lock serialises rendering: matplotlib's text layout shares global
parser state, so concurrent suite threads must not draw simultaneously.
"""

from __future__ import annotations

import threading

import numpy as np
from matplotlib.figure import Figure

_FIG_SIZE = (6.4, 4.2)
_RENDER_LOCK = threading.Lock()


def _serialised(render):
    def wrapper(*args, **kwargs):
        with _RENDER_LOCK:
            return render(*args, **kwargs)

    return wrapper


@_serialised
def render_norm_series(series, fits, path):
    fig = Figure(figsize=_FIG_SIZE)
    ax = fig.subplots()
    for k in range(series.max_order + 1):
        row = series.norms[k]
        if np.all(row <= 0):
            continue
        ax.loglog(series.times, row, marker=".", lw=1.0, label=f"order {k}")
    for fit in fits:
        lo, hi = fit.window
        tt = np.logspace(np.log10(lo), np.log10(hi), 32)
        ax.loglog(tt, fit.prefactor * tt**fit.slope, "k--", lw=0.8)
        ax.annotate(
            f"slope {fit.slope:.2f}",
            (tt[len(tt) // 2], fit.prefactor * tt[len(tt) // 2] ** fit.slope),
            fontsize=8,
            textcoords="offset points",
            xytext=(4, 4),
        )
    ax.set_xlabel("t")
    ax.set_ylabel("squared seminorm")
    ax.grid(True, which="both", alpha=0.3)
    if ax.lines:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)


@_serialised
def render_energy(energy, path):
    fig = Figure(figsize=_FIG_SIZE)
    ax = fig.subplots()
    ax.semilogx(energy.times, energy.m1, marker=".", lw=1.0, label="first-order energy")
    ax.semilogx(energy.times, energy.m_weighted, marker=".", lw=1.0, label=f"weighted energy (order {energy.order})")
    ax.axhline(energy.initial, color="k", lw=0.8, ls=":", label="initial value")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)


@_serialised
def render_spectrum(profiles, path):
    """``profiles`` is a list of (time, DecayProfile) pairs."""
    fig = Figure(figsize=_FIG_SIZE)
    ax = fig.subplots()
    for t, profile in profiles:
        keep = (profile.amplitude > 0) & (profile.shells > 0)
        if not np.any(keep):
            continue
        ax.loglog(profile.shells[keep], profile.amplitude[keep], marker=".", lw=1.0, label=f"t = {t:.3g}")
    ax.set_xlabel("mode shell |frequency|")
    ax.set_ylabel("shell-averaged amplitude")
    ax.grid(True, which="both", alpha=0.3)
    if ax.lines:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
