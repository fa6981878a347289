#!/usr/bin/env python3
"""Offline benchmark against the mock backend: compares the five init modes
and the three reproduction modes on one synthetic scale-free network, then
prints the mean/SD grid with rank-sum decisions and the ANOVA over arms.

    python scripts/run_mock_benchmark.py --out runs/mock_bench --runs 10
"""

import argparse
import os
import sys
import tempfile

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from evograph import synth
from evograph.experiment import config_from_flat, run_experiment
from evograph.graph import serialize_edge_list
from evograph.reports import emit_reports


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/mock_bench")
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=21)
    parser.add_argument("--generations", type=int, default=10)
    parser.add_argument("--network", default=None, help="edge list; default = synthetic BA(300,3)")
    args = parser.parse_args()

    network = args.network
    if network is None:
        g = synth.barabasi_albert(300, 3, seed=args.seed)
        os.makedirs(args.out, exist_ok=True)
        network = os.path.join(args.out, "network.edges")
        with open(network, "w", encoding="utf-8") as fh:
            fh.write(serialize_edge_list(g))

    flat = {
        "network": network,
        "out": args.out,
        "runs": args.runs,
        "seed": args.seed,
        "backend": "mock",
        "sparsify.n_v": 50,
        "sparsify.n_e": 100,
        "community.small_fraction": 0.02,
        "engine.k": 10,
        "engine.n_p": 15,
        "engine.p_c": 0.2,
        "engine.p_m": 0.1,
        "engine.generations": args.generations,
        # init-mode arms (normal reproduction)
        "arm.init_random.init_mode": "random",
        "arm.init_refined.init_mode": "refined_random",
        "arm.init_degree.init_mode": "high_degree",
        "arm.init_betweenness.init_mode": "high_betweenness",
        "arm.init_mllm.init_mode": "mllm",
        # reproduction arms (refined-random init)
        "arm.repro_normal.reproduction_mode": "normal",
        "arm.repro_oneshot.reproduction_mode": "mllm_oneshot",
        "arm.repro_twophase.reproduction_mode": "mllm_twophase",
    }
    cfg = config_from_flat(flat)
    summary = run_experiment(cfg)
    emit_reports(args.out)

    print("\narm                mean      sd        n")
    for arm in sorted(summary.arms):
        s = summary.arms[arm]
        print(f"{arm:<18} {s['mean']:<9.4f} {s['sd']:<9.4f} {s['n']}")
    print("\npairwise rank-sum decisions (a vs b):")
    for w in summary.wilcoxon:
        print(f"  {w['a']:<16} {w['decision']} {w['b']:<16} (p={w['p_value']:.4g})")
    if summary.anova:
        print(
            f"\nANOVA across arms: F={summary.anova['f_stat']:.2f} "
            f"p={summary.anova['p_value']:.3g} different={summary.anova['different']}"
        )
    if summary.average_rank:
        print("\naverage rank:", {a: round(r, 2) for a, r in summary.average_rank.items()})
    print(f"\nreports under {args.out}/reports")
    return 0


if __name__ == "__main__":
    sys.exit(main())
