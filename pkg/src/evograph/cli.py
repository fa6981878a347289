"""Command-line entry point. Each pipeline stage is independently invocable:

    evograph communities --network net.edges --out outdir
    evograph sparsify    --network net.edges --n-v 50 --n-e 100 --out outdir
    evograph render      --network net.edges --phase mutation --solution 1,2,3 --out outdir
    evograph run         --config exp.cfg [--seed N] [--backend mock|live] ...
    evograph stats       --runs-dir outdir
    evograph report      --runs-dir outdir [--plots]
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from evograph.community import detect_fastgreedy, merge_small, merge_to_target, serialize_communities
from evograph.experiment import (
    ExperimentError,
    load_config,
    run_experiment,
    stats_from_run_dir,
)
from evograph.graph import largest_component, read_edge_list
from evograph.render import RenderSpec, SolutionRenderer
from evograph.reports import emit_reports
from evograph.sparsify import sparsify_if_large, write_sparsified


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="out", help="output directory")


def _cmd_communities(args) -> int:
    g, report = read_edge_list(args.network)
    cs = detect_fastgreedy(g)
    initial = len(cs)
    if args.small_fraction:
        cs = merge_small(g, cs, args.small_fraction)
    if args.target is not None:
        cs = merge_to_target(g, cs, args.target)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "communities.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_communities(cs))
    print(f"nodes={g.n} edges={g.edge_count} communities={initial} -> {len(cs)}")
    print(f"wrote {path}")
    return 0


def _cmd_sparsify(args) -> int:
    g, report = read_edge_list(args.network)
    cs = detect_fastgreedy(g)
    if args.small_fraction:
        cs = merge_small(g, cs, args.small_fraction)
    if args.target is not None:
        cs = merge_to_target(g, cs, args.target)
    sg = sparsify_if_large(g, cs, args.n_v, args.n_e, args.policy, args.seed)
    paths = write_sparsified(sg, args.out)
    print(
        f"input |V|={g.n} |E|={g.edge_count}; "
        f"working |V|={sg.graph.n} |E|={sg.graph.edge_count} sparsified={sg.sparsified}"
    )
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_render(args) -> int:
    g, _ = read_edge_list(args.network)
    g = largest_component(g)
    solution = []
    if args.solution:
        resolver = {str(lab): lab for lab in g.nodes()}
        for token in args.solution.split(","):
            token = token.strip()
            if token not in resolver:
                print(f"error: solution node {token!r} not in the graph", file=sys.stderr)
                return 2
            solution.append(resolver[token])
    renderer = SolutionRenderer(g, args.style, rng_seed=args.seed, spec=RenderSpec())
    img = renderer.render(solution, args.phase)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"render_{args.phase}.png")
    img.save(path, format="PNG")
    print(f"wrote {path}")
    return 0


def _cmd_run(args) -> int:
    overrides = {
        "seed": args.seed,
        "backend": args.backend,
        "out": args.out,
        "network": args.network,
        "engine.objective": args.objective,
    }
    cfg = load_config(args.config, overrides)
    if args.arm:
        missing = [a for a in args.arm if a not in cfg.arms]
        if missing:
            print(f"error: unknown arms {missing}; config has {sorted(cfg.arms)}", file=sys.stderr)
            return 2
        cfg.arms = {name: cfg.arms[name] for name in args.arm}
    summary = run_experiment(cfg)
    print(f"wrote {cfg.out}/experiment.json")
    for arm in sorted(summary.arms):
        s = summary.arms[arm]
        print(f"{arm}: mean={s['mean']:.4f} sd={s['sd']:.4f} n={s['n']}")
    for w in summary.wilcoxon:
        print(f"{w['a']} vs {w['b']}: p={w['p_value']:.4g} decision={w['decision']}")
    return 0


def _cmd_stats(args) -> int:
    summary = stats_from_run_dir(args.runs_dir)
    path = os.path.join(args.runs_dir, "stats.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(summary.to_json())
    print(summary.to_json(), end="")
    return 0


def _cmd_report(args) -> int:
    produced = emit_reports(args.runs_dir, plots=args.plots)
    for p in produced:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evograph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("communities", help="detect and merge communities")
    p.add_argument("--network", required=True)
    p.add_argument("--small-fraction", type=float, default=0.02)
    p.add_argument("--target", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_communities)

    p = sub.add_parser("sparsify", help="reduce a network to the node/edge budget")
    p.add_argument("--network", required=True)
    p.add_argument("--n-v", type=int, default=50)
    p.add_argument("--n-e", type=int, default=100)
    p.add_argument("--policy", choices=("random", "degree_keep"), default="random")
    p.add_argument("--small-fraction", type=float, default=0.02)
    p.add_argument("--target", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=_cmd_sparsify)

    p = sub.add_parser("render", help="draw one phase-styled solution image")
    p.add_argument("--network", required=True)
    p.add_argument("--phase", choices=("init", "crossover", "mutation"), default="init")
    p.add_argument("--solution", default="", help="comma-separated node labels")
    p.add_argument("--style", choices=("KK", "FR"), default="KK")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--backend", choices=("mock", "live"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--network", default=None)
    p.add_argument("--objective", choices=("edv", "dismantling"), default=None)
    p.add_argument("--arm", action="append", help="restrict to named arms (repeatable)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("stats", help="recompute statistics from a run directory")
    p.add_argument("--runs-dir", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("report", help="emit report files from a run directory")
    p.add_argument("--runs-dir", required=True)
    p.add_argument("--plots", action="store_true")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExperimentError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
