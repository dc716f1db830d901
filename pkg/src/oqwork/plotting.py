"""Matplotlib figures for the sweeps, saved as deterministic SVG files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "svg.hashsalt": "oqwork",
    "svg.fonttype": "path",
    "figure.dpi": 100,
}


def _save(fig, path) -> None:
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def plot_qubit_sweep(rows, landscape, mus, path) -> None:
    """OQ entries, extracted work against the classical cap, and the bound landscape."""
    t = np.array([r.t for r in rows])
    q = np.array([np.ravel(r.q) for r in rows])
    with matplotlib.rc_context(_RC):
        fig, axes = plt.subplots(1, 3, figsize=(14, 4.2))
        ax = axes[0]
        for k, lab in enumerate(("q00", "q01", "q10", "q11")):
            ax.plot(t, q[:, k], label=lab)
        ax.axhline(0.0, color="0.6", lw=0.8)
        ax.set_xlabel("t")
        ax.set_ylabel("OQ entry")
        ax.legend(fontsize=8)

        ax = axes[1]
        ax.plot(t, [r.w_q for r in rows], label="W_q (OQ)")
        ax.plot(t, [r.w_cl for r in rows], "--", label="W_cl max (JM)")
        ax.plot(t, [r.w_tpm for r in rows], ":", label="W_TPM")
        ax.set_xlabel("t")
        ax.set_ylabel("extracted work")
        ax.legend(fontsize=8)

        ax = axes[2]
        img = ax.imshow(np.asarray(landscape).T, origin="lower", aspect="auto",
                        extent=(t[0], t[-1], mus[0], mus[-1]), interpolation="nearest")
        fig.colorbar(img, ax=ax, label="classical bound")
        ax.set_xlabel("t")
        ax.set_ylabel("sharpness")
        fig.tight_layout()
    _save(fig, path)


def plot_nv_sweep(rows, path) -> None:
    """EPM probabilities, OQ against MHQ mean work, and both negativities."""
    t = np.array([r.t for r in rows])
    epm = np.array([r.epm for r in rows])
    with matplotlib.rc_context(_RC):
        fig, axes = plt.subplots(1, 3, figsize=(14, 4.2))
        ax = axes[0]
        for f in range(epm.shape[1]):
            ax.plot(t, epm[:, f], label=f"EPM outcome {f}")
        ax.plot(t, [r.dark_epm for r in rows], "k:", label="zero-energy level")
        ax.set_xlabel("t (us)")
        ax.set_ylabel("probability")
        ax.legend(fontsize=8)

        ax = axes[1]
        ax.plot(t, [r.w_oq for r in rows], label="<w> OQ")
        ax.plot(t, [r.w_mhq for r in rows], "--", label="<w> MHQ")
        ax.set_xlabel("t (us)")
        ax.set_ylabel("mean work")
        ax.legend(fontsize=8)

        ax = axes[2]
        ax.plot(t, [r.neg_oq for r in rows], label="N[OQ]")
        ax.plot(t, [r.neg_mhq for r in rows], "--", label="N[MHQ]")
        ax.set_xlabel("t (us)")
        ax.set_ylabel("negativity")
        ax.legend(fontsize=8)
        fig.tight_layout()
    _save(fig, path)


def plot_bound_curve(mus, bounds, mu_star, w_star, path) -> None:
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(mus, bounds)
        ax.plot([mu_star], [w_star], "o", label=f"max at {mu_star:.4f}")
        ax.set_xlabel("sharpness")
        ax.set_ylabel("classical bound")
        ax.legend(fontsize=8)
        fig.tight_layout()
    _save(fig, path)
