"""Command-line interface: ``cayleydiam <subcommand> ...``.

Exit codes: 0 success, 1 verification violations, 2 config or input error,
3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import DEFAULT_CAP_ORDER, _validate_job, load_config
from .corpus import closure_witness_groups, default_corpus, extra_corpus, small_corpus
from .errors import CapacityError, CayleyDiamError, ConfigError
from .groups import build_group
from .jobs import header_for, merge_rows, run_tasks, task_list
from .report import EXIT_CAPACITY, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATIONS, csv_text, run_config, write_csv
from .verify import verify_all

log = logging.getLogger("cayleydiam")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=d, help="64-bit master seed (default 0)")
    parser.add_argument("--workers", type=int, default=d, help="worker processes (default 1; run uses the CPU count)")
    parser.add_argument("--out", default=d, help="output directory (default: print to stdout)")
    parser.add_argument(
        "--cap-order", type=int, default=d, help=f"largest group order to build (default {DEFAULT_CAP_ORDER})"
    )


def _groups_args(p, required=True):
    p.add_argument("--group", "-g", action="append", dest="groups", required=required, help="group descriptor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cayleydiam", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("f-eval", "evaluate f(c) and f~(c)")
    _groups_args(p)
    p.add_argument("--c", type=float, nargs="+", required=True)
    p.add_argument("--mode", choices=("exact", "factorised", "estimate"), default="exact")
    p.add_argument("--x-sample", type=int, default=4096)
    p.add_argument("--y-sample", type=int, default=1 << 16)

    p = add("simulate", "Monte Carlo estimate of P(diameter <= 2)")
    _groups_args(p)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--p", type=float, nargs="+")
    grid.add_argument("--c", type=float, nargs="+", help="c_equiv values, p = sqrt(c ln n / n)")
    p.add_argument("--trials", type=int, required=True)

    p = add("exact", "exact far probability and its product lower bound")
    _groups_args(p)
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--x", type=int, nargs="+", help="element indices (default: all x != 1)")

    p = add("depgraph", "dependency graph census")
    _groups_args(p)
    p.add_argument("--x", type=int, nargs="+", help="element indices (default: all x != 1)")

    for name, text in (("verify-tables", "case-table sweep"), ("verify-observations", "degree and loop checks")):
        p = add(name, text)
        _groups_args(p, required=False)
        p.add_argument("--corpus", help="default, extra, witness or small:<n> (default: default)")

    p = add("verify-all", "every structural check over a corpus")
    _groups_args(p, required=False)
    p.add_argument("--corpus", help="default, extra, witness, small:<n> or none (default: default)")

    p = add("family", "family members, thresholds and edge censuses")
    p.add_argument("--spec", required=True, help="thm2:c, thm3:c, thm4:c or thm5:n")
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--emit", choices=("descriptor", "threshold", "census"), default="descriptor")

    p = add("run", "run an experiment config")
    p.add_argument("config")
    return parser


def _one_job(args, raw: dict) -> int:
    job = _validate_job("args", raw)
    tasks = task_list(job.type, job.params, args.seed, args.cap_order)
    results = run_tasks(tasks, args.workers or 1)
    for r in results:
        if r.error:
            print(f"error: {r.error}", file=sys.stderr)
    rows = merge_rows(job.type, results)
    header = header_for(job.type, job.params)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_csv(os.path.join(args.out, f"{job.type}.csv"), header, rows)
    else:
        sys.stdout.write(csv_text(header, rows))
    if job.type == "verify_tables":
        report = {
            "populations": {str(r[0]): r[3] for r in rows if r[0]},
            "printed_partition_mismatches": {str(r[0]): r[4] for r in rows if r[4]},
            "violations": sum(r[5] for r in rows),
        }
        print(json.dumps(report, sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    if any(r.error_kind == "error" for r in results):
        return EXIT_CONFIG
    if any(r.error_kind == "capacity" for r in results):
        return EXIT_CAPACITY
    return EXIT_VIOLATIONS if any(r.violations for r in results) else EXIT_OK


def _corpus_groups(args):
    name = args.corpus or ("none" if args.groups else "default")
    groups = [build_group(g) for g in args.groups or []]
    if name == "none":
        return groups
    if name == "default":
        return default_corpus() + groups
    if name == "extra":
        return extra_corpus() + groups
    if name == "witness":
        return closure_witness_groups() + groups
    kind, _, arg = name.partition(":")
    if kind == "small" and arg.isdigit():
        return small_corpus(int(arg)) + groups
    raise ConfigError(f"unknown corpus {name!r}")


def _verify_all(args) -> int:
    groups = _corpus_groups(args)
    for G in groups:
        if G.order > args.cap_order:
            raise CapacityError(f"{G.name} has order {G.order}, above the cap {args.cap_order}")
    summary = verify_all(groups, args.seed)
    rows = summary.rows()
    header = ("check", "checked", "violations")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_csv(os.path.join(args.out, "verify_all.csv"), header, rows)
    else:
        sys.stdout.write(csv_text(header, rows))
    for name, tally in summary.tallies.items():
        for w in tally.witnesses:
            print(f"violation in {name}: {w}", file=sys.stderr)
    return EXIT_OK if summary.ok else EXIT_VIOLATIONS


def dispatch(args) -> int:
    cmd = args.command.replace("-", "_")
    if cmd == "run":
        config = load_config(args.config)
        if args.out:
            config.out = args.out
        if args.cap_order is not None:
            config.cap_order = args.cap_order
        if args.seed is not None:
            config.seed = args.seed
        report = run_config(config, args.workers)
        for job in report.jobs:
            for e in job.errors:
                print(f"{job.name}: {e['kind']} error: {e['message']}", file=sys.stderr)
        print(report.manifest_path)
        return report.exit_code
    if args.seed is None:
        args.seed = 0
    if args.cap_order is None:
        args.cap_order = DEFAULT_CAP_ORDER
    if cmd == "verify_all":
        return _verify_all(args)
    raw: dict = {"type": cmd}
    if cmd == "f_eval":
        raw.update(groups=args.groups, c=args.c, mode=args.mode, x_sample=args.x_sample, y_sample=args.y_sample)
    elif cmd == "simulate":
        raw.update(groups=args.groups, trials=args.trials)
        raw.update({"p": args.p} if args.p is not None else {"c": args.c})
    elif cmd == "exact":
        raw.update(groups=args.groups, p=args.p, x=args.x or "all")
    elif cmd == "depgraph":
        raw.update(groups=args.groups, x=args.x or "all")
    elif cmd in ("verify_tables", "verify_observations"):
        if args.groups and args.corpus:
            raise ConfigError("give either --group or --corpus")
        raw.update({"groups": args.groups} if args.groups else {"corpus": args.corpus or "default"})
    elif cmd == "family":
        raw.update(spec=args.spec, k=args.k, emit=args.emit)
    return _one_job(args, raw)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    for flag, value in (("--workers", args.workers), ("--cap-order", args.cap_order)):
        if value is not None and value < 1:
            print(f"error: {flag} must be positive", file=sys.stderr)
            return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 1 << 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return dispatch(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (CayleyDiamError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
