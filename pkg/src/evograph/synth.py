"""Seeded synthetic graph generators for experiments and tests."""

from __future__ import annotations

import random

from evograph.graph import Graph, connected_components


def erdos_renyi(n: int, p: float, seed: int, ensure_connected: bool = False) -> Graph:
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    g = Graph.from_edges(edges, nodes=range(n))
    if ensure_connected:
        g = _connect(g, rng)
    return g


def _connect(g: Graph, rng: random.Random) -> Graph:
    comps = connected_components(g)
    if len(comps) <= 1:
        return g
    edges = list(g.edges())
    anchors = [min(c) for c in comps]
    for a, b in zip(anchors, anchors[1:]):
        edges.append((a, b))
    return Graph.from_edges(edges, nodes=g.nodes())


def barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment: each arriving node wires to m distinct targets
    sampled proportionally to degree."""
    if n <= m:
        raise ValueError("need n > m")
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = []
    repeated: list[int] = list(range(m + 1))  # seed clique-ish core
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edges.append((i, j))
            repeated += [i, j]
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[rng.randrange(len(repeated))])
        for t in sorted(targets):
            edges.append((new, t))
            repeated += [new, t]
    return Graph.from_edges(edges, nodes=range(n))


def planted_partition(sizes: list[int], p_in: float, p_out: float, seed: int) -> Graph:
    """Blocks of the given sizes with dense intra- and sparse inter-block
    wiring; connectivity is patched deterministically."""
    rng = random.Random(seed)
    blocks: list[list[int]] = []
    start = 0
    for size in sizes:
        blocks.append(list(range(start, start + size)))
        start += size
    n = start
    edges = []
    for b, block in enumerate(blocks):
        for i_pos, u in enumerate(block):
            for v in block[i_pos + 1 :]:
                if rng.random() < p_in:
                    edges.append((u, v))
        for other in blocks[b + 1 :]:
            for u in block:
                for v in other:
                    if rng.random() < p_out:
                        edges.append((u, v))
    g = Graph.from_edges(edges, nodes=range(n))
    return _connect(g, rng)


def two_cluster_bridge(
    cluster_size: int = 10,
    n_bridges: int = 3,
    intra_p: float = 0.35,
    links_per_side: int = 6,
    seed: int = 0,
) -> tuple[Graph, list[int]]:
    """Two sparse clusters joined only through ``n_bridges`` high-degree
    connector nodes; removing every connector disconnects the clusters.

    Returns (graph, bridge_labels). Bridges are wired to ``links_per_side``
    nodes in each cluster, making them the top-degree nodes by construction.
    """
    rng = random.Random(seed)
    a = list(range(cluster_size))
    b = list(range(cluster_size, 2 * cluster_size))
    bridges = list(range(2 * cluster_size, 2 * cluster_size + n_bridges))
    edges = []
    for block in (a, b):
        for i_pos, u in enumerate(block):
            for v in block[i_pos + 1 :]:
                if rng.random() < intra_p:
                    edges.append((u, v))
        # ring so each cluster is connected on its own
        for i_pos in range(len(block)):
            edges.append((block[i_pos], block[(i_pos + 1) % len(block)]))
    links = min(links_per_side, cluster_size)
    for bridge in bridges:
        for side in (a, b):
            targets = rng.sample(side, links)
            for t in targets:
                edges.append((bridge, t))
    g = Graph.from_edges(edges, nodes=range(2 * cluster_size + n_bridges))
    return g, bridges


def path_graph(n: int) -> Graph:
    return Graph.from_edges([(i, i + 1) for i in range(n - 1)], nodes=range(n))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(
        [(i, (i + 1) % n) for i in range(n)], nodes=range(n)
    )


def star_graph(n_leaves: int) -> Graph:
    return Graph.from_edges([(0, i) for i in range(1, n_leaves + 1)], nodes=range(n_leaves + 1))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(
        [(i, j) for i in range(n) for j in range(i + 1, n)], nodes=range(n)
    )
