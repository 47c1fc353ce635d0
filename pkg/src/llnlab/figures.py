"""Static matplotlib renderings of run outputs, written straight to files.

These are optional companions to the delimited/text reports; nothing here
is interactive and no GUI backend is touched.
"""

from __future__ import annotations

from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_TRAJ_LINES = 60  # plotting more spaghetti than this helps nobody


def _new_axes(figsize=(7.0, 4.5)):
    fig = Figure(figsize=figsize)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    return fig, ax


def _save(fig: Figure, path: str | Path) -> None:
    fig.tight_layout()
    fig.savefig(str(path), dpi=150)


def save_trajectory_figure(path, trajectories, scenario, hlines=()) -> None:
    """Running means of sampled trajectories on a log-n axis, with reference
    levels (gamma, delta, the plan target) drawn as dashed lines."""
    fig, ax = _new_axes()
    for tr in trajectories[:_TRAJ_LINES]:
        ns = [n for n, _ in tr.checkpoints]
        ms = [m for _, m in tr.checkpoints]
        ax.plot(ns, ms, lw=0.7, alpha=0.45, color="steelblue")
    for label, level in hlines:
        ax.axhline(float(level), ls="--", lw=1.0, color="firebrick")
        ax.annotate(
            label,
            xy=(1.0, float(level)),
            xycoords=("axes fraction", "data"),
            xytext=(-4, 2),
            textcoords="offset points",
            ha="right",
            fontsize=8,
            color="firebrick",
        )
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("running mean $S_n/n$")
    ax.set_title(f"{len(trajectories)} trajectories, payoff span "
                 f"[{scenario.psi.vmin}, {scenario.psi.vmax}]")
    _save(fig, path)


def save_weaklaw_figure(path, rows) -> None:
    """Inner/outer event bounds (and the plan probability when present)
    against the horizon n.  `rows` are (n, inner, outer, plan_prob|None)."""
    fig, ax = _new_axes()
    ns = [r[0] for r in rows]
    ax.plot(ns, [float(r[1]) for r in rows], "o-", label="inner measure", color="seagreen")
    ax.plot(ns, [float(r[2]) for r in rows], "s-", label="outer measure", color="firebrick")
    if any(r[3] is not None for r in rows):
        ax.plot(
            [r[0] for r in rows if r[3] is not None],
            [float(r[3]) for r in rows if r[3] is not None],
            "d--",
            label="plan probability",
            color="steelblue",
        )
    ax.set_xlabel("n")
    ax.set_ylabel("probability of the deviation event")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="center right", fontsize=8)
    _save(fig, path)


def save_certify_figure(path, reports) -> None:
    """Grouped bars: per event kind, the empirical frequency under each plan."""
    fig, ax = _new_axes(figsize=(8.0, 4.5))
    kinds = [rep.event_kind for rep in reports]
    plan_names = [name for name, _, _ in reports[0].rows]
    width = 0.8 / max(1, len(plan_names))
    colors = ["steelblue", "firebrick", "goldenrod", "seagreen", "slategray"]
    for j, pname in enumerate(plan_names):
        xs = [i + j * width for i in range(len(kinds))]
        ys = []
        for rep in reports:
            freq = {name: f for name, _, f in rep.rows}
            ys.append(freq[pname])
        ax.bar(xs, ys, width=width, label=pname, color=colors[j % len(colors)])
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(kinds))])
    ax.set_xticklabels(kinds, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("empirical frequency")
    ax.set_ylim(0, 1.05)
    ax.axhline(0.95, ls=":", lw=0.8, color="gray")
    ax.axhline(0.05, ls=":", lw=0.8, color="gray")
    ax.legend(fontsize=8)
    _save(fig, path)


def save_analyze_figure(path, scenario) -> None:
    """Payoff with its measurable minorant and majorant, point by point."""
    fig, ax = _new_axes()
    xs = range(scenario.space.size)
    labels = [str(p) for p in scenario.space.points]
    ax.plot(xs, [float(v) for v in scenario.psi.values], "o", label="payoff", color="black")
    ax.step(
        xs,
        [float(v) for v in scenario.psi_minorant.values],
        where="mid",
        label="minorant",
        color="seagreen",
    )
    ax.step(
        xs,
        [float(v) for v in scenario.psi_majorant.values],
        where="mid",
        label="majorant",
        color="firebrick",
    )
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    _save(fig, path)
