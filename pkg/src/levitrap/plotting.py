"""PNG figures written next to the CSV/JSON outputs (opt-in via ``--plot``)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_report(doc, path):
    """Occupations per axis and operating-condition margins."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    axes = ["1", "2", "3"]
    x = np.arange(3)
    no_fb = [doc["rates"]["m_no_feedback"][a] for a in axes]
    ax1.bar(x - 0.2, no_fb, 0.4, label="no feedback")
    fb = doc.get("feedback")
    if fb:
        ax1.bar(x + 0.2, [fb["occupations"][a] for a in axes], 0.4,
                label=f"{fb['scheme']} feedback")
    ax1.set_yscale("log")
    ax1.set_xticks(x, [f"axis {a}" for a in axes])
    ax1.set_ylabel("mean phonon number")
    ax1.legend()
    conds = doc.get("conditions") or []
    if conds:
        values = [c["margin"] if math.isfinite(c["margin"]) else np.nan for c in conds]
        colors = ["tab:green" if c["passed"] else "tab:red" for c in conds]
        ax2.barh(range(len(conds)), values, color=colors)
        ax2.axvline(conds[0]["threshold"], color="k", ls="--", lw=1)
        ax2.set_yticks(range(len(conds)), [c["label"] for c in conds])
        ax2.set_xscale("log")
        ax2.set_xlabel("margin")
    else:
        ax2.text(0.5, 0.5, "no feedback plan", ha="center", va="center")
        ax2.set_axis_off()
    return _save(fig, path)


def plot_sweep(header, rows, parameters, columns, path):
    """Selected columns against the first swept parameter (log-log when positive)."""
    idx = {h: i for i, h in enumerate(header)}
    xname = parameters[0]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = np.array([r[idx[xname]] for r in rows], dtype=float)
    for col in columns:
        ys = np.array([r[idx[col]] if r[idx[col]] not in ("", None) else np.nan
                       for r in rows], dtype=float)
        ax.plot(xs, ys, "o-", label=col)
    if np.all(xs > 0):
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xname)
    ax.legend()
    return _save(fig, path)


def plot_psd(omega, density, floor, label, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(omega[1:], density[1:], lw=0.8, label=f"{label} estimate")
    ax.axhline(floor, color="k", ls="--", label="analytic floor")
    ax.set_xlabel("ω (rad/s)")
    ax.set_ylabel("S (N²·s)")
    ax.legend()
    return _save(fig, path)
