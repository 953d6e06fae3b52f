"""Bound-curve figures rendered beside the delimited output.

Kept intentionally small: one figure for the unitary-step quantities
(classic and modified production versus time, one curve pair per sweep
value) and, when the sweep carries finite-time ledgers, a second figure
for the finite-time production.  Everything renders off-screen.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

from .experiments import SweepResult


def _series(result: SweepResult):
    by_value: dict[float, list] = {}
    for row in result.rows:
        by_value.setdefault(row.sweep_value, []).append(row)
    return by_value


def render_figures(result: SweepResult, base_path: str) -> list[str]:
    """Write PNGs next to the table; returns the paths written."""
    by_value = _series(result)
    if not by_value or all(len(rows) < 2 for rows in by_value.values()):
        return []
    written = []
    label = result.sweep_parameter

    fig, (ax_old, ax_mod) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for value, rows in sorted(by_value.items()):
        ts = [r.time for r in rows]
        ax_old.plot(ts, [r.bound.sigma_old for r in rows], label=f"{label}={value:g}")
        ax_mod.plot(ts, [r.bound.sigma_mod for r in rows], label=f"{label}={value:g}")
    for ax, title in ((ax_old, "classic production"), (ax_mod, "modified production")):
        ax.axhline(0.0, color="black", linewidth=0.6)
        ax.set_xlabel("time")
        ax.set_title(title)
        ax.legend(fontsize="small")
    ax_old.set_ylabel("nats")
    fig.tight_layout()
    path = f"{base_path}_bounds.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    if result.has_finite_time:
        fig, ax = plt.subplots(figsize=(6, 4))
        for value, rows in sorted(by_value.items()):
            ts = [r.time for r in rows]
            ax.plot(ts, [r.finite.sigma_tau for r in rows], label=f"{label}={value:g}")
        ax.axhline(0.0, color="black", linewidth=0.6)
        ax.set_xlabel("time")
        ax.set_ylabel("nats")
        ax.set_title("finite-time production")
        ax.legend(fontsize="small")
        fig.tight_layout()
        path = f"{base_path}_finite.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
