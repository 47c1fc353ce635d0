"""Command line entry point.

Four subcommands, all driven by a JSON config (rationals as "num/den"
strings) plus a few override flags:

* analyze   -- atom table, minorant/majorant, lower/upper expectation
* simulate  -- CSV of running means, one row per (trajectory, checkpoint)
* weaklaw   -- exact inner/outer event bounds per horizon, plus the exact
               plan probability when a plan is configured
* certify   -- empirical two-extension certificates for the limit events

Exit codes: 0 success, 2 invalid config, 3 enumeration budget exceeded,
4 certification hypothesis violated.  `--plot PATH` additionally renders a
matplotlib figure of the run next to the delimited/text output.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from .config import ConfigError, LoadedConfig, dump_config, load_config
from .core import is_measurable
from .engine import (
    BudgetExceededError,
    HypothesisError,
    CertificateReport,
    exact_event_bounds,
    exact_plan_event_prob,
    evaluate_event_frequencies,
    run_trajectories,
    standard_certify_plans,
)
from .plans import make_schedule, plan_for_target

CSV_HEADER = ["trajectory_id", "seed", "n", "mean"]


def _fmt(q: Fraction) -> str:
    return f"{q} ({float(q):.6g})"


def cmd_analyze(cfg: LoadedConfig, plot: str | None):
    sc = cfg.scenario
    lines = ["atoms:"]
    for block in sc.field.blocks:
        lines.append(
            "  {" + ", ".join(str(p) for p in block) + "}"
            + f"  weight {sc.space.mass(block)}"
        )
    def row(name, values):
        return f"{name:<10}" + "  ".join(
            f"{p}={v}" for p, v in zip(sc.space.points, values)
        )
    lines.append(row("psi:", sc.psi.values))
    lines.append(row("minorant:", sc.psi_minorant.values))
    lines.append(row("majorant:", sc.psi_majorant.values))
    lines.append(f"lower expectation: {_fmt(sc.gamma)}")
    lines.append(f"upper expectation: {_fmt(sc.delta)}")
    measurable = is_measurable(sc.space, sc.field, sc.psi)
    lines.append(f"payoff measurable: {'yes' if measurable else 'no'}")
    if measurable:
        lines.append("degenerate case: lower and upper expectations coincide, "
                     "the strong law pins every sample mean")
    if plot:
        from .figures import save_analyze_figure

        save_analyze_figure(plot, sc)
    return "\n".join(lines) + "\n"


def cmd_simulate(cfg: LoadedConfig, plot: str | None):
    if cfg.plan is None:
        raise ConfigError("plan", "section required for simulate")
    run = cfg.run
    trajectories = run_trajectories(
        cfg.plan, run.n_max, run.trials, run.seed, run.checkpoints
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for tid, tr in enumerate(trajectories):
        for n, mean in tr.checkpoints:
            writer.writerow([tid, tr.seed, n, repr(mean)])
    if plot:
        from .figures import save_trajectory_figure

        sc = cfg.scenario
        hlines = [("lower expectation", sc.gamma), ("upper expectation", sc.delta)]
        if hasattr(cfg.plan, "target_mean"):
            hlines.append(("target", cfg.plan.target_mean))
        save_trajectory_figure(plot, trajectories, sc, hlines)
    return buf.getvalue()


def cmd_weaklaw(cfg: LoadedConfig, plot: str | None):
    if cfg.weaklaw is None:
        raise ConfigError("weaklaw", "section required for weaklaw")
    wl = cfg.weaklaw
    sc = cfg.scenario
    rows = []
    for n in range(wl.n_start, wl.n_stop + 1):
        inner, outer = exact_event_bounds(
            sc, n, wl.center, wl.epsilon, budget=cfg.run.budget
        )
        plan_prob = None
        if wl.include_plan and cfg.plan is not None:
            plan_prob = exact_plan_event_prob(
                cfg.plan, n, wl.center, wl.epsilon, budget=cfg.run.budget
            )
        rows.append((n, inner, outer, plan_prob))
    lines = [
        f"deviation event: |S_n/n - {wl.center}| > {wl.epsilon}",
        f"{'n':>4}  {'inner':>12}  {'(dec)':>10}  {'outer':>12}  {'(dec)':>10}"
        + ("  {:>12}  {:>10}".format("plan", "(dec)") if any(r[3] is not None for r in rows) else "")
        + f"  {'event':>7}",
    ]
    for n, inner, outer, plan_prob in rows:
        shape = "empty" if outer == 0 else ("full" if inner == 1 else "proper")
        line = (
            f"{n:>4}  {str(inner):>12}  {float(inner):>10.6f}"
            f"  {str(outer):>12}  {float(outer):>10.6f}"
        )
        if plan_prob is not None:
            line += f"  {str(plan_prob):>12}  {float(plan_prob):>10.6f}"
        line += f"  {shape:>7}"
        lines.append(line)
    if plot:
        from .figures import save_weaklaw_figure

        save_weaklaw_figure(plot, rows)
    return "\n".join(lines) + "\n"


def _certify_reports(cfg: LoadedConfig) -> list[CertificateReport]:
    if cfg.certify is None:
        raise ConfigError("certify", "section required for certify")
    ct = cfg.certify
    sc = cfg.scenario
    target = ct.target
    target.require_proper_subset(sc.gamma, sc.delta)
    schedule = None
    if ct.schedule_spec is not None:
        schedule = make_schedule(
            ct.schedule_spec.get("kind", "factorial"),
            sc,
            **{k: v for k, v in ct.schedule_spec.items() if k != "kind"},
        )
    plans = list(standard_certify_plans(sc, target, schedule))
    if ct.off_target is not None:
        plans[1] = ("target-off-A", plan_for_target(sc, ct.off_target))
    freqs, meta = evaluate_event_frequencies(
        sc,
        plans,
        list(ct.kinds),
        target,
        n_max=cfg.run.n_max,
        trials=cfg.run.trials,
        master_seed=cfg.run.seed,
        checkpoints=cfg.run.checkpoints,
    )
    reports = []
    for kind in ct.kinds:
        rows = tuple((name, plan.describe(), freqs[kind][name]) for name, plan in plans)
        reports.append(
            CertificateReport(
                event_kind=kind,
                target_set=target,
                n_max=cfg.run.n_max,
                trials=cfg.run.trials,
                master_seed=cfg.run.seed,
                tolerance=meta["tolerance"],
                osc_threshold=meta["osc_threshold"],
                window_start=meta["window_start"],
                rows=rows,
            )
        )
    return reports


def cmd_certify(cfg: LoadedConfig, plot: str | None):
    reports = _certify_reports(cfg)
    lines = [
        f"nonmeasurability certificates over target set {reports[0].target_set}",
        f"horizon n_max={cfg.run.n_max}, trials={cfg.run.trials}, "
        f"master seed={cfg.run.seed}",
        "",
    ]
    for rep in reports:
        lines.append(f"event kind: {rep.event_kind}")
        lines.append(f"  surrogate: {rep.surrogate_description()}")
        for name, desc, freq in rep.rows:
            lines.append(f"  plan {name:<18} [{desc}] frequency {freq:.3f}")
        lines.append(f"  conclusion: {rep.conclusion()}")
        lines.append("")
    if plot:
        from .figures import save_certify_figure

        save_certify_figure(plot, reports)
    return "\n".join(lines)


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "weaklaw": cmd_weaklaw,
    "certify": cmd_certify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llnlab",
        description="exact and simulated long-run sample-mean behaviour for "
        "nonmeasurable payoffs on finite probability spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("config", help="path to the JSON scenario config")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--n-max", type=int, default=None, help="override run.n_max")
        p.add_argument("--trials", type=int, default=None, help="override run.trials")
        p.add_argument("--budget", type=int, default=None, help="override run.budget")
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        p.add_argument("--plot", default=None, help="also render a figure (PNG) to this path")
        p.add_argument(
            "--dump-config",
            action="store_true",
            help="print the validated, normalized config and exit",
        )
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "seed": args.seed,
        "n_max": args.n_max,
        "trials": args.trials,
        "budget": args.budget,
    }
    try:
        cfg = load_config(args.config, overrides)
        if args.dump_config:
            _emit(dump_config(cfg), args.out)
            return 0
        text = COMMANDS[args.command](cfg, args.plot)
        _emit(text, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
