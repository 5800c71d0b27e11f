"""Figure rendering for the CLI report paths.

Figures are written next to the delimited output files; all rendering is
headless (Agg backend). Each function takes already-computed rows so the
plots stay a pure view of the CSV/JSON data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FIGSIZE = (6.4, 4.0)
DPI = 150


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_sweep_figure(rows: list[dict], path: str) -> None:
    """Normalized worst-case loss versus horizon, one curve per house."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    houses = sorted({row["house"] for row in rows})
    for house in houses:
        pts = sorted((r["T"], r["normalized_loss"]) for r in rows if r["house"] == house)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=house)
    bound_pts = sorted(
        (r["T"], r["bound"]) for r in rows if r["bound"] is not None and r["house"] == houses[0]
    )
    if bound_pts:
        ax.plot(
            [p[0] for p in bound_pts],
            [p[1] for p in bound_pts],
            linestyle="--",
            color="gray",
            label=f"{houses[0]} bound",
        )
    ax.set_xscale("log", base=2)
    ax.set_xlabel("horizon T")
    ax.set_ylabel("worst loss / T")
    ax.axhline(1.0, color="black", linewidth=0.8)
    ax.legend()
    ax.set_title("worst-case normalized loss")
    _save(fig, path)


def render_transcript_figure(transcript, path: str) -> None:
    """Posted odds and cumulative exposures over the rounds of one game."""
    ts = []
    l0s = []
    l1s = []
    rs = []
    l0 = l1 = 0.0
    for t, (r, q) in enumerate(transcript.rounds, start=1):
        l0 += (1.0 - q) / (1.0 - r)
        l1 += q / r
        ts.append(t)
        l0s.append(l0)
        l1s.append(l1)
        rs.append(r)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(FIGSIZE[0], FIGSIZE[1] * 1.4), sharex=True)
    ax1.plot(ts, rs, marker=".", color="tab:blue")
    ax1.set_ylabel("odds r")
    ax1.set_ylim(0.0, 1.0)
    ax2.plot(ts, l0s, label="exposure team 0")
    ax2.plot(ts, l1s, label="exposure team 1")
    ax2.set_xlabel("round")
    ax2.set_ylabel("cumulative exposure")
    ax2.legend()
    _save(fig, path)


def render_blackwell_trace_figure(rows: list[dict], path: str) -> None:
    """Average loss components against the anytime bound."""
    ts = [row["t"] for row in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(ts, [row["phi1"] for row in rows], label="avg loss team 0")
    ax.plot(ts, [row["phi2"] for row in rows], label="avg loss team 1")
    ax.plot(ts, [row["bound"] for row in rows], linestyle="--", color="gray", label="bound")
    ax.set_xlabel("round")
    ax.set_ylabel("average loss")
    ax.legend()
    _save(fig, path)


def render_compare_figure(rows: list[dict], path: str) -> None:
    """Bar chart of normalized losses per house for one matchup."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    houses = [row["house"] for row in rows]
    ax.bar(houses, [row["normalized_loss"] for row in rows], color="tab:blue")
    ax.axhline(1.0, color="black", linewidth=0.8)
    ax.set_ylabel("loss / T")
    _save(fig, path)
