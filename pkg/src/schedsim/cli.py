"""Command-line front end: ``run``, ``gen``, ``suite`` and ``compare``.

Exit codes: 0 success, 1 invalid input (bad flags, unreadable or invalid
workload, infeasible generator spec), 2 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import metrics
from .engine import HorizonExceeded, InvalidWorkload, format_trace, run
from .model import NmlfqConfig, SimConfig
from .policies import POLICY_NAMES
from .workload import (GenSpec, InfeasibleSpec, ParseError, ValidationError, format_workload,
                       generate, load_suite, write_suite)

log = logging.getLogger("schedsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _out_default(leaf):
    return str(Path(os.environ.get("SCHEDSIM_OUT", ".")) / leaf)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _pair(text, cast):
    lo, _, hi = text.partition(",")
    return cast(lo), cast(hi or lo)


def _add_sim_flags(p):
    g = p.add_argument_group("simulation")
    g.add_argument("--dispatch-latency", type=int, default=0)
    g.add_argument("--context-switch-cost", type=int, default=0)
    g.add_argument("--rr-quantum", type=int, default=1000)
    g.add_argument("--horizon", type=int)
    g.add_argument("--base-quantum", type=int, default=1000)
    g.add_argument("--max-levels", type=int, default=8)
    g.add_argument("--urgency-factor", type=Fraction, default=Fraction(1))
    g.add_argument("--aging-threshold", type=int)
    g.add_argument("--admission", choices=("planning", "accept_all"), default="planning")


def _sim_config(args) -> SimConfig:
    try:
        nm = NmlfqConfig(base_quantum=args.base_quantum, max_levels=args.max_levels,
                         min_levels=min(2, args.max_levels),
                         urgency_factor=args.urgency_factor,
                         aging_threshold=args.aging_threshold, admission=args.admission)
        return SimConfig(dispatch_latency=args.dispatch_latency,
                         context_switch_cost=args.context_switch_cost,
                         rr_quantum=args.rr_quantum, horizon=args.horizon, nmlfq=nm)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_gen_flags(p):
    p.add_argument("--tasks", type=int, default=20)
    p.add_argument("--load", type=float, default=0.8)
    p.add_argument("--span", type=int, default=100_000)
    p.add_argument("--burst-min", type=int, default=500)
    p.add_argument("--burst-max", type=int, default=10_000)
    p.add_argument("--deadline-tightness", default="1.5,4.0",
                   help="factor range lo,hi; deadline = arrival + burst * factor")
    p.add_argument("--value-mode", default="unit", help="'unit' or 'uniform:lo,hi'")
    p.add_argument("--seed", type=int, default=0)


def _gen_spec(args) -> GenSpec:
    if args.value_mode == "unit":
        value_mode = "unit"
    elif args.value_mode.startswith("uniform:"):
        value_mode = ("uniform", *_pair(args.value_mode[len("uniform:"):], float))
    else:
        raise UsageError(f"--value-mode: expected 'unit' or 'uniform:lo,hi', got {args.value_mode!r}")
    return GenSpec(n_tasks=args.tasks, target_load=args.load, span=args.span,
                   burst_range=(args.burst_min, args.burst_max),
                   deadline_tightness=_pair(args.deadline_tightness, float),
                   value_mode=value_mode, seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schedsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate one workload under one policy")
    p.add_argument("--workload", required=True)
    p.add_argument("--policy", required=True, choices=POLICY_NAMES)
    p.add_argument("--out")
    _add_sim_flags(p)

    p = sub.add_parser("gen", help="generate one workload CSV")
    _add_gen_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("suite", help="write the bundled twenty-case suite")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="run several policies over a suite and compare")
    p.add_argument("--suite", help="suite directory (default: the bundled suite)")
    p.add_argument("--policies", default="nmlfq,dasa,lbesa")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--svg", action="store_true", help="also write response.svg")
    _add_sim_flags(p)
    return parser


def cmd_run(args) -> int:
    from .workload import parse

    config = _sim_config(args)
    workload = parse(args.workload)
    out = Path(args.out or _out_default("run"))
    try:
        trace, states = run(workload, args.policy, config)
    except HorizonExceeded as exc:
        log.warning("%s", exc)
        trace, states = exc.trace, exc.states
    report = metrics.compute(trace, states)
    _write_atomic(out / "trace.csv", format_trace(trace))
    _write_atomic(out / "metrics.csv", metrics.format_metrics(report))
    summary = metrics.format_summary(report)
    _write_atomic(out / "summary.txt", summary)
    sys.stdout.write(summary)
    return 0


def cmd_gen(args) -> int:
    workload = generate(_gen_spec(args))
    text = format_workload(workload)
    if args.out:
        _write_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_suite(args) -> int:
    out = Path(args.out or _out_default("suite"))
    paths = write_suite(out)
    print(f"wrote {len(paths)} cases to {out}")
    return 0


def _run_case(job):
    workload, label, policy, config = job
    try:
        trace, states = run(workload, policy, config)
    except HorizonExceeded as exc:
        trace, states = exc.trace, exc.states
    trace.policy = label
    return workload.name, label, format_trace(trace), metrics.compute(trace, states)


def cmd_compare(args) -> int:
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    if len(policies) < 2:
        raise UsageError("--policies: need at least two policies to compare")
    bad = [p for p in policies if p not in POLICY_NAMES]
    if bad:
        raise UsageError(f"--policies: unknown policy {bad[0]!r}")
    labels = []
    for p in policies:
        n = sum(1 for q in labels if q.split("#")[0] == p)
        labels.append(p if n == 0 else f"{p}#{n + 1}")
    config = _sim_config(args)
    workloads = load_suite(args.suite)
    out = Path(args.out or _out_default("compare"))
    jobs = [(w, label, label.split("#")[0], config) for w in workloads for label in labels]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_case, jobs))
    else:
        results = [_run_case(j) for j in jobs]

    table = metrics.compare([r[3] for r in results], reference=labels[0])
    for case, label, trace_text, report in results:
        _write_atomic(out / "cases" / case / label / "trace.csv", trace_text)
        _write_atomic(out / "cases" / case / label / "metrics.csv", metrics.format_metrics(report))
    _write_atomic(out / "comparison.csv", metrics.format_comparison_csv(table))
    text = metrics.format_comparison_text(table)
    _write_atomic(out / "comparison.txt", text)
    if args.svg:
        metrics.plot_response(table, out / "response.svg")
    sys.stdout.write(text)
    for p in labels[1:]:
        red = table.reduction(p)
        shown = "n/a" if red is None else f"{float(red) * 100:.1f}%"
        print(f"aggregate response-time reduction of {table.reference} vs {p}: {shown}")
    return 0


COMMANDS = {"run": cmd_run, "gen": cmd_gen, "suite": cmd_suite, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"schedsim: error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValidationError, InvalidWorkload, InfeasibleSpec, FileNotFoundError) as exc:
        print(f"schedsim: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"schedsim: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
