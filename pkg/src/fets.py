from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from exceptions import ConfigError, InsufficientDataError
from harness import aggregate_dirs, compare_runs, load_config, run, write_report
from harness.config import resolve_environment

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_DATA_GAP = 3


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    print("\n=== Validating config ===")
    config = load_config(args.config)
    kind, layout = resolve_environment(config)
    print(f"  name={config.run.name}  environment={config.run.environment} ({kind}: {layout})")
    print(f"  methods={', '.join(config.run.methods)}")
    print(f"  seeds={config.run.seeds}  episodes={config.run.episodes}  step_cap={config.run.step_cap}")
    print("  OK")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    print("\n=== Step 1: Loading config ===")
    config = load_config(args.config)
    out_dir = Path(args.out) if args.out else config.output_dir() / config.run.name
    print(f"  [{config.run.name}] {len(config.run.methods)} method(s) x {len(config.run.seeds)} seed(s) -> {out_dir}")

    print("\n=== Step 2: Running ===")
    start = time.perf_counter()
    summary = run(config, out_dir, jobs=args.jobs)
    for job in sorted(summary.jobs, key=lambda j: (j.seed, j.method)):
        status = "ok" if job.status == "ok" else f"FAILED: {job.error}"
        print(f"  [{job.method} seed={job.seed}] rows={job.rows}  time={job.elapsed_sec:.1f}s  {status}")

    print("\n=== Summary ===")
    failed = sum(1 for job in summary.jobs if job.status != "ok")
    print(f"  jobs={len(summary.jobs)}  failed={failed}  time={time.perf_counter() - start:.1f}s")
    print(f"\nResults written to: {out_dir}")
    return EXIT_OK if summary.complete else EXIT_RUNTIME


def cmd_aggregate(args: argparse.Namespace) -> int:
    print("\n=== Aggregating runs ===")
    summary = aggregate_dirs([Path(d) for d in args.dirs], Path(args.out))
    print(f"  rows={len(summary)}  methods={sorted(summary['method'].unique()) if len(summary) else []}")
    print(f"\nAggregate written to: {args.out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    print("\n=== Writing report ===")
    result = write_report(Path(args.aggregate), Path(args.out) if args.out else None)
    for chart in result.charts:
        print(f"  chart: {chart}")
    for check in result.checks:
        print(f"  [{check.result}] {check.check} ({check.environment}): {check.detail}")
    for gap in result.gaps:
        print(f"  note: {gap}")
    print(f"\nReport written to: {result.path}")
    return EXIT_DATA_GAP if args.strict and result.gaps else EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    print("\n=== Comparing runs ===")
    result = compare_runs(args.a, args.b, metric=args.metric, window=args.window)
    start, stop = result.window
    print(f"  metric={result.metric}  episodes={start}..{stop - 1}  seeds={result.seeds}")
    print(f"  mean A={result.mean_a:.4f}  mean B={result.mean_b:.4f}")
    print(f"  Wilcoxon (A > B): statistic={result.statistic:.1f}  p={result.p_value:.4g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fets", description="Concurrent subspace learning experiments: run -> aggregate -> report.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("run", help="Run every (seed, method) job of a config.")
    p.add_argument("config", help="INI run config.")
    p.add_argument("--jobs", type=int, default=1, help="Parallel worker processes (default: 1).")
    p.add_argument("--out", default=None, help="Output directory (default: <run.output>/<run.name>).")
    p.set_defaults(func=cmd_run)

    p = commands.add_parser("aggregate", help="Mean and standard error across seeds.")
    p.add_argument("dirs", nargs="+", help="Run directories.")
    p.add_argument("--out", default="results/aggregate.csv", help="Output CSV (default: results/aggregate.csv).")
    p.set_defaults(func=cmd_aggregate)

    p = commands.add_parser("report", help="Charts and markdown report from an aggregate CSV.")
    p.add_argument("aggregate", help="Aggregate CSV.")
    p.add_argument("--out", default=None, help="Report directory (default: next to the aggregate).")
    p.add_argument("--strict", action="store_true", help="Exit 3 when a chart had no data.")
    p.set_defaults(func=cmd_report)

    p = commands.add_parser("compare", help="One-sided Wilcoxon signed-rank test, A > B.")
    p.add_argument("a", help="Run directory, or DIR:METHOD.")
    p.add_argument("b", help="Run directory, or DIR:METHOD.")
    p.add_argument("--metric", default="acc_reward", help="Column summed per seed (default: acc_reward).")
    p.add_argument("--window", default="0:50", help="Episode window start:stop, stop excluded (default: 0:50).")
    p.set_defaults(func=cmd_compare)

    p = commands.add_parser("validate", help="Parse and validate a config without running it.")
    p.add_argument("config", help="INI run config.")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (InsufficientDataError, ValueError, OSError, RuntimeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
