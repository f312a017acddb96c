"""Command-line front end: ``knapsack``, ``tree`` and ``verify`` subcommands.

Exit codes: 0 success, 1 verification mismatch, 2 parse error, 3 configuration
error (including oracle size limits).
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import core
from .data_io import (RunSummary, fingerprint, parse_dataset, parse_knapsack, write_mean_trace,
                      write_summary, write_trace, mean_best_energies)
from .decision_tree import DecisionTreeAdapter, SplitConfig, dt_energy, exhaustive_min_energy, split_dataset
from .errors import ConfigError, DomainError, ParseError, TooLarge
from .knapsack import BRUTE_FORCE_MAX_ITEMS, KnapsackAdapter, ks_brute_force_oracle, ks_dp_oracle

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_CONFIG = 0, 1, 2, 3
EXHAUST = 10**15
TREE_VERIFY_LIMIT = 50_000


@dataclass
class BenchPlan:
    problem: str
    input_path: str
    algo: str = "dfs"
    iterations: Optional[int] = None
    seeds: list = field(default_factory=list)
    depth_const: float = 0.0
    epsilon: float = 1e-12
    time_budget_ms: Optional[int] = None
    canonical: bool = True
    split: tuple = (0.5, 0.2, 0.3)
    split_seed: int = 0
    bins: list = field(default_factory=list)
    stopping: SplitConfig = field(default_factory=SplitConfig)
    out: Optional[str] = None
    summary: Optional[str] = None
    timing: bool = True


def parse_seeds(text: str) -> list:
    """``"1..50"`` (inclusive) and/or comma-separated integers."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        elif part:
            seeds.append(int(part))
    for s in seeds:
        if not 0 <= s < 2**64:
            raise ValueError(f"seed {s} is not an unsigned 64-bit integer")
    return seeds


def _load(plan: BenchPlan):
    """Returns ``(adapter, fingerprint, test set or None)``; raises ParseError."""
    raw = Path(plan.input_path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(1, f"input is not UTF-8: {exc}") from None
    if plan.problem == "knapsack":
        return KnapsackAdapter(parse_knapsack(text), canonical=plan.canonical), fingerprint(raw), None
    dataset = parse_dataset(text, plan.bins)
    train, val, test = split_dataset(dataset, plan.split, plan.split_seed)
    return DecisionTreeAdapter(train, val, plan.stopping), fingerprint(raw), test


def _seed_path(out: str, suffix: str) -> Path:
    p = Path(out)
    stem = p.name[:-len(p.suffix)] if p.suffix else p.name
    return p.with_name(f"{stem}.{suffix}{p.suffix or '.csv'}")


def _config(plan: BenchPlan, seed=None) -> core.SearchConfig:
    iters = plan.iterations if plan.iterations is not None else 100
    return core.SearchConfig(max_iterations=iters, depth_const=plan.depth_const, epsilon=plan.epsilon,
                             time_budget_ms=plan.time_budget_ms, seed=seed)


def _stopping(plan: BenchPlan) -> dict:
    if plan.problem != "tree":
        return {}
    s = plan.stopping
    return {"max_depth": s.max_depth, "min_entropy": f"{s.min_entropy:.9g}", "min_rows": s.min_rows}


def _check_plan(plan: BenchPlan) -> None:
    if plan.algo not in ("greedy", "dfs", "rss"):
        raise ConfigError(f"unknown algorithm {plan.algo!r}")
    if plan.algo == "greedy" and plan.iterations is not None:
        raise ConfigError("--iters does not apply to the greedy algorithm")
    if plan.algo == "rss" and not plan.seeds:
        raise ConfigError("rss needs at least one seed (--seeds)")
    if plan.algo != "rss" and plan.seeds:
        raise ConfigError(f"--seeds only applies to rss, not {plan.algo}")


def run(plan: BenchPlan, stdout=None) -> int:
    """Execute one experiment plan and write its trace(s) and summary."""
    stdout = stdout or sys.stdout
    try:
        _check_plan(plan)
        adapter, fp, test = _load(plan)
        t0 = time.perf_counter()
        if plan.algo == "greedy":
            best, trace = core.greedy_only(adapter, _config(plan))
            traces = [trace]
        elif plan.algo == "dfs":
            best, trace = core.dfs_search(adapter, _config(plan))
            traces = [trace]
        else:
            traces = []
            best, best_e = None, None
            for seed in plan.seeds:
                state, trace = core.rss_search(adapter, _config(plan, seed))
                traces.append(trace)
                if best_e is None or trace.records[-1].best_energy < best_e:
                    best, best_e = state, trace.records[-1].best_energy
        wall = int((time.perf_counter() - t0) * 1000) if plan.timing else 0
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, DomainError, TooLarge, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if len(traces) == 1:
        trace = traces[0]
        if plan.out:
            write_trace(trace, plan.out, timing=plan.timing)
        best_energy = trace.records[-1].best_energy
        best_iteration = trace.best_iteration()
        iterations = trace.records[-1].iteration
    else:
        if plan.out:
            for trace in traces:
                write_trace(trace, _seed_path(plan.out, f"seed{trace.seed}"), timing=plan.timing)
            write_mean_trace(traces, _seed_path(plan.out, "mean"))
        means = mean_best_energies(traces)
        best_energy = means[-1]
        best_iteration = means.index(best_energy)
        iterations = len(means) - 1

    summary = RunSummary(plan.algo, plan.seeds, iterations, best_energy, best_iteration, wall,
                         plan.depth_const, plan.epsilon, fp, _stopping(plan))
    lines = summary.lines()
    if test is not None:
        lines.append(f"test_energy={dt_energy(best, test):.9g}")
    text = "\n".join(lines) + "\n"
    if plan.summary:
        Path(plan.summary).write_text(text, encoding="utf-8")
    stdout.write(text)
    return EXIT_OK


def verify(plan: BenchPlan, stdout=None) -> int:
    """Run DFS to queue exhaustion and compare with the exact oracle(s)."""
    stdout = stdout or sys.stdout
    try:
        adapter, _, _ = _load(plan)
        if plan.problem == "knapsack":
            inst = adapter.instance
            if inst.n > BRUTE_FORCE_MAX_ITEMS:
                raise TooLarge(f"verify is limited to {BRUTE_FORCE_MAX_ITEMS} items, got {inst.n}")
            oracle = ks_brute_force_oracle(inst)
            dp = ks_dp_oracle(inst)
            if dp != oracle:
                print(f"oracles disagree: dp={dp} brute_force={oracle}", file=sys.stderr)
                return EXIT_MISMATCH
            _, trace = core.dfs_search(adapter, core.SearchConfig(max_iterations=EXHAUST))
            found = int(-trace.records[-1].best_energy)
        else:
            oracle = int(exhaustive_min_energy(adapter.train, adapter.validation, plan.stopping,
                                                limit=TREE_VERIFY_LIMIT))
            _, trace = core.dfs_search(adapter, core.SearchConfig(max_iterations=EXHAUST))
            found = int(trace.records[-1].best_energy)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, DomainError, TooLarge, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    status = "OK" if found == oracle else "MISMATCH"
    stdout.write(f"dfs={found} oracle={oracle} {status}\n")
    return EXIT_OK if found == oracle else EXIT_MISMATCH


def _split_ratios(text: str) -> tuple:
    parts = tuple(float(x) for x in text.split(","))
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--split needs three comma-separated ratios")
    return parts


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=("greedy", "dfs", "rss"), default="dfs")
    p.add_argument("--iters", type=int, default=None, help="search iterations after the greedy one (default 100)")
    p.add_argument("--depth-const", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=1e-12)
    p.add_argument("--seeds", default=None, help="RSS seeds, e.g. 1..50 or 3,7,11")
    p.add_argument("--time-budget-ms", type=int, default=None)
    p.add_argument("--out", default=None, help="trace CSV path")
    p.add_argument("--summary", default=None, help="summary file path")
    p.add_argument("--no-timing", action="store_true", help="write zero elapsed times")


def _add_tree_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--min-entropy", type=float, default=0.0)
    p.add_argument("--min-rows", type=int, default=1)
    p.add_argument("--split", type=_split_ratios, default=(0.5, 0.2, 0.3))
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--bin", action="append", default=[], metavar="COL:K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dilemma-search", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ks = sub.add_parser("knapsack", help="search a 0-1 knapsack instance")
    _add_search_flags(ks)
    ks.add_argument("--no-canonical", action="store_true",
                    help="allow every ordering of the same item set as a distinct path")
    ks.add_argument("input")

    tree = sub.add_parser("tree", help="optimise an ID3 decision tree on a CSV dataset")
    _add_search_flags(tree)
    _add_tree_flags(tree)
    tree.add_argument("input")

    ver = sub.add_parser("verify", help="exhaust DFS and compare with exact oracles")
    ver.add_argument("problem", choices=("knapsack", "tree"))
    ver.add_argument("input")
    ver.add_argument("--no-canonical", action="store_true")
    _add_tree_flags(ver)
    return parser


def plan_from_args(args) -> BenchPlan:
    command = args.command
    problem = args.problem if command == "verify" else command
    plan = BenchPlan(problem=problem, input_path=args.input,
                     canonical=not getattr(args, "no_canonical", False))
    if command != "verify":
        plan.algo = args.algo
        plan.iterations = args.iters
        plan.seeds = parse_seeds(args.seeds) if args.seeds else []
        plan.depth_const = args.depth_const
        plan.epsilon = args.epsilon
        plan.time_budget_ms = args.time_budget_ms
        plan.out = args.out
        plan.summary = args.summary
        plan.timing = not args.no_timing
    if problem == "tree":
        plan.split = args.split
        plan.split_seed = args.split_seed
        plan.bins = list(args.bin)
        plan.stopping = SplitConfig(args.max_depth, args.min_entropy, args.min_rows)
    return plan


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        plan = plan_from_args(args)
    except (ValueError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "verify":
        return verify(plan)
    return run(plan)


if __name__ == "__main__":
    sys.exit(main())
