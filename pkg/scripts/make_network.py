#!/usr/bin/env python3
"""Generate a seeded synthetic network as an edge-list file.

    python scripts/make_network.py ba --n 300 --m 3 --seed 21 --out data/ba300.edges
    python scripts/make_network.py planted --sizes 400,300,300 --seed 7 --out data/pp1000.edges
    python scripts/make_network.py bridges --cluster-size 10 --bridges 3 --out data/bridges.edges
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from evograph import synth
from evograph.graph import serialize_edge_list


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("ba", help="scale-free preferential attachment")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--m", type=int, default=3)

    p = sub.add_parser("planted", help="planted-community blocks")
    p.add_argument("--sizes", default="400,300,300")
    p.add_argument("--avg-degree", type=float, default=6.0)

    p = sub.add_parser("bridges", help="two clusters joined by connector nodes")
    p.add_argument("--cluster-size", type=int, default=10)
    p.add_argument("--bridges", type=int, default=3)
    p.add_argument("--links-per-side", type=int, default=6)

    for sp in sub.choices.values():
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)

    args = parser.parse_args()
    if args.kind == "ba":
        g = synth.barabasi_albert(args.n, args.m, seed=args.seed)
    elif args.kind == "planted":
        sizes = [int(s) for s in args.sizes.split(",")]
        total = sum(sizes)
        g = synth.planted_partition(
            sizes, args.avg_degree * 5.0 / total, args.avg_degree * 0.25 / total, seed=args.seed
        )
    else:
        g, bridge_nodes = synth.two_cluster_bridge(
            args.cluster_size, args.bridges, links_per_side=args.links_per_side, seed=args.seed
        )
        print(f"bridge nodes: {bridge_nodes}")
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(serialize_edge_list(g))
    print(f"wrote {args.out}: |V|={g.n} |E|={g.edge_count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
