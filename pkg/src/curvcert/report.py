"""Figure rendering for emitted records.

Each experiment gets one or two diagnostic figures written as PNG files
next to the delimited output.  The delimited record remains the
contract; figures are a convenience rendering of the same rows.
"""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .emit import ResultRecord


def _save(fig, outdir, name):
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def render_figures(record: ResultRecord, outdir: str) -> list:
    """Render the figure set for a record; returns the written paths."""
    exp = record.experiment
    rows = record.rows
    written = []
    if not rows:
        return written

    if exp == "curvature-audit":
        closed = [r["sec"] for r in rows if r.get("path") == "closed"]
        fd = [r["sec"] for r in rows if r.get("path") == "fd"]
        band = record.summary.get("pinching_band", [None, None])
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(closed, bins=40, alpha=0.6, label="closed path")
        ax.hist(fd, bins=40, alpha=0.6, label="finite differences")
        for b in band:
            if b is not None:
                ax.axvline(b, color="k", ls="--", lw=0.8)
        ax.set_xlabel("sectional curvature")
        ax.set_ylabel("samples")
        ax.legend()
        written.append(_save(fig, outdir, f"{exp}-histogram.png"))

    elif exp == "verify-comparison":
        inc = [r["eta_min_increment"] for r in rows]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(inc, bins=40)
        ax.axvline(-1e-6, color="r", ls="--", lw=0.8, label="slack")
        ax.set_xlabel("min increment of |J|/sinh along the ray")
        ax.set_ylabel("rays")
        ax.legend()
        written.append(_save(fig, outdir, f"{exp}-eta-increments.png"))

    elif exp in ("verify-primitive", "kaehler-primitive"):
        r = np.array([row["r"] for row in rows])
        phi = np.array([row["phi_norm"] for row in rows])
        psi = np.array([row["psi_norm"] for row in rows])
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.scatter(r, phi, s=6, label="|primitive|")
        ax.scatter(r, psi, s=6, alpha=0.4, label="|source|")
        k = int(record.config.get("k", 2))
        sup_psi = float(np.max(psi))
        if record.summary.get("kind") != "flat-contrast":
            grid = np.linspace(1e-3, max(r), 120)
            cap = sup_psi * np.array([np.tanh(g / 2) if k == 2 else 1.0 / (k - 1)
                                      for g in grid])
            ax.plot(grid, cap, "k--", lw=0.9, label="bound")
        ax.set_xlabel("geodesic radius")
        ax.set_ylabel("h-norm")
        ax.legend()
        written.append(_save(fig, outdir, f"{exp}-bound.png"))

    elif exp == "verify-contact":
        r = np.array([row["r"] for row in rows])
        fig, ax = plt.subplots(figsize=(6, 4))
        if any("levi" in row for row in rows):
            levi = np.array([row["levi"] for row in rows if "levi" in row])
            rl = np.array([row["r"] for row in rows if "levi" in row])
            ax.scatter(rl, levi, s=8, label="Levi pairing")
            grid = np.linspace(min(rl), max(rl), 100)
            ax.plot(grid, 2.0 / np.tanh(grid), "k--", lw=0.9, label="2 coth r")
            ax.axhline(2.0, color="r", ls=":", lw=0.9, label="floor 2")
        else:
            ax.scatter(r, [row["beta_norm"] for row in rows], s=8, label="|beta|")
        ax.set_xlabel("sphere radius")
        ax.legend()
        written.append(_save(fig, outdir, f"{exp}-levi.png"))

    elif exp == "horizon-limit":
        rr = [row["r"] for row in rows if "sup_diff_next" in row]
        dd = [row["sup_diff_next"] for row in rows if "sup_diff_next" in row]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.semilogy(rr, dd, "o-")
        ax.set_xlabel("sphere radius")
        ax.set_ylabel("sup-difference to the next radius")
        written.append(_save(fig, outdir, f"{exp}-decay.png"))

    return written
