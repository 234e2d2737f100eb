"""Figure rendering for CLI reports.

Everything draws through the Agg backend straight to files; nothing here
opens a window.  Each saver takes data already computed by the library,
so plots never re-run experiments.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_spectrum_plot",
    "save_ser_plot",
    "save_tolerance_plot",
    "save_efficiency_plot",
    "save_bound_plot",
]

_DB_FLOOR = 1e-30


def _db(x):
    return 10 * np.log10(np.maximum(x, _DB_FLOOR))


def save_spectrum_plot(est, path, mask=None, w_sym=None) -> None:
    """Binned power spectrum in dB, with band edges and an optional mask.

    The mask overlay needs w_sym (Hz) to map its frequency axis onto
    symbol-rate units.
    """
    fig, ax = plt.subplots(figsize=(7, 4.5))
    rel = est.p_binned / est.p_binned.sum()
    order = np.argsort(est.binned_freqs)
    ax.plot(est.binned_freqs[order], _db(rel[order]), lw=1.0, label="binned PSD")
    for edge in (-est.m_order / 2, est.m_order / 2):
        ax.axvline(edge, color="k", ls=":", lw=0.8)
    if mask is not None and w_sym is not None:
        zeta = est.binned_freqs[order]
        ax.plot(zeta, mask.level_db(zeta * w_sym), "r--", lw=1.0, label="mask")
    ax.set_xlabel("frequency (symbol-rate units)")
    ax.set_ylabel("relative power (dB)")
    ax.set_ylim(bottom=-90)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"M={est.m_order}, {est.trials} trials, OoW={est.oow:.2e}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_ser_plot(curves: dict, path) -> None:
    """Semilog SER curves with Wilson interval bands, one per label."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, rows in curves.items():
        eb = [r["eb_n0_db"] for r in rows]
        ser = [max(r["ser"], 1e-9) for r in rows]
        lo = [max(r["ci_lo"], 1e-9) for r in rows]
        hi = [max(r["ci_hi"], 1e-9) for r in rows]
        (line,) = ax.semilogy(eb, ser, "o-", ms=4, label=label)
        ax.fill_between(eb, lo, hi, alpha=0.2, color=line.get_color())
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("symbol error rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tolerance_plot(curves: dict, path) -> None:
    """Peak correlation versus carrier offset, one curve per label."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, rows in curves.items():
        ax.plot(rows[:, 0], rows[:, 1], lw=1.2, label=label)
    ax.set_xlabel("carrier offset (symbol-rate units)")
    ax.set_ylabel("peak matched-filter magnitude")
    ax.set_ylim(0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bound_plot(etas, eps_db, path) -> None:
    """Minimum Eb/N0 against DoF per bit."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(etas, eps_db, "o-", ms=4, lw=1.0)
    ax.set_xscale("log")
    ax.set_xlabel("DoF per bit")
    ax.set_ylabel("minimum Eb/N0 (dB)")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_efficiency_plot(points, path, shannon=None) -> None:
    """(eta, epsilon) scatter with the Shannon-Hartley curve underneath.

    shannon is an optional (eta_grid, eps_db_grid) pair; if omitted a
    default grid spanning the points is drawn.
    """
    fig, ax = plt.subplots(figsize=(7, 4.5))
    etas = [p.eta for p in points]
    if shannon is None and etas:
        grid = np.geomspace(min(etas) / 4, max(etas) * 4, 200)
        from .harness import shannon_bound

        shannon = (grid, [shannon_bound(g)[1] for g in grid])
    if shannon is not None:
        ax.plot(shannon[0], shannon[1], "k-", lw=1.0, label="Shannon bound")
    for p in points:
        ax.plot(p.eta, p.epsilon_db, "o", ms=6, label=p.label or p.channel)
    ax.set_xscale("log")
    ax.set_xlabel("DoF per bit")
    ax.set_ylabel("Eb/N0 per bit at target (dB)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
