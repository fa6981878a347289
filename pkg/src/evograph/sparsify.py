"""Community-proportional, betweenness-ranked graph reduction.

Large graphs are shrunk to a node/edge budget: per-community quotas select
the top-betweenness nodes, the induced subgraph is edge-pruned to the budget,
and the largest connected component survives. The result is relabeled to
dense integers (what gets drawn and what the chat backends answer with) and
carries a bijective map back to original labels.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from evograph.community import CommunityStructure
from evograph.graph import (
    Graph,
    GraphError,
    Label,
    betweenness,
    connected_components,
    induced_subgraph,
    label_key,
    largest_component,
    serialize_edge_list,
)

PRUNE_POLICIES = ("random", "degree_keep")


@dataclass(frozen=True)
class PruneReport:
    edges_before: int
    edges_removed: int
    isolated_removed: int
    components_dropped: int
    quota_clamped: int = 0


@dataclass(frozen=True)
class SparsifiedGraph:
    """Working graph plus the label bijection back to the original.

    For pass-through wraps (graph already under budget) ``node_map`` is the
    identity and ``sparsified`` is False.
    """

    graph: Graph
    node_map: dict  # working label -> original label
    quotas: tuple[int, ...] = ()
    selected: tuple[tuple, ...] = ()  # pre-prune selections per community, original labels
    prune_report: PruneReport = field(default_factory=lambda: PruneReport(0, 0, 0, 0))
    sparsified: bool = False

    @property
    def inverse_map(self) -> dict:
        return {orig: work for work, orig in self.node_map.items()}

    def to_original(self, members) -> tuple:
        return tuple(self.node_map[m] for m in members)

    def to_working(self, members) -> tuple:
        inv = self.inverse_map
        return tuple(inv[m] for m in members)

    @classmethod
    def passthrough(cls, g: Graph) -> "SparsifiedGraph":
        return cls(graph=g, node_map={lab: lab for lab in g.nodes()}, sparsified=False)


def community_quotas(cs: CommunityStructure, total_nodes: int, n_target: int) -> list[int]:
    """ceil(|C_i| / total_nodes * n_target) per community, in community order."""
    if len(cs) == 0:
        raise GraphError("empty community structure")
    if n_target < 1:
        raise GraphError("node target must be >= 1")
    # integer-exact ceiling; float division would misround large counts
    return [-(-len(c) * n_target // total_nodes) for c in cs.communities]


def _prune_edges(
    edges: list[tuple[Label, Label]],
    degrees: dict,
    excess: int,
    policy: str,
    rng: random.Random,
) -> list[tuple[Label, Label]]:
    """Drop ``excess`` edges; random = uniform via rng, degree_keep = drop the
    smallest endpoint-degree-sums first (ties by label pair)."""
    canonical = sorted(
        (tuple(sorted(e, key=label_key)) for e in edges),
        key=lambda e: (label_key(e[0]), label_key(e[1])),
    )
    if policy == "random":
        removed = set(rng.sample(range(len(canonical)), excess))
        return [e for i, e in enumerate(canonical) if i not in removed]
    if policy == "degree_keep":
        ranked = sorted(
            canonical,
            key=lambda e: (degrees[e[0]] + degrees[e[1]], label_key(e[0]), label_key(e[1])),
        )
        dropped = set(ranked[:excess])
        return [e for e in canonical if e not in dropped]
    raise GraphError(f"unknown prune policy {policy!r}")


def sparsify(
    g: Graph,
    cs: CommunityStructure,
    n_v: int,
    n_e: int,
    prune_policy: str = "random",
    rng_seed: int = 0,
) -> SparsifiedGraph:
    """Reduce ``g`` to at most ``n_e`` edges over community-quota node picks.

    Betweenness is computed once on the full graph; within each community the
    quota-many highest-betweenness nodes are selected (ties by ascending
    label). Quotas exceeding a community's size are clamped and counted.
    """
    if n_v < 1 or n_e < 1:
        raise GraphError("node and edge targets must be >= 1")
    if prune_policy not in PRUNE_POLICIES:
        raise GraphError(f"unknown prune policy {prune_policy!r}")
    cs.validate(g)
    bc = betweenness(g)
    quotas = community_quotas(cs, g.n, n_v)
    clamped = 0
    selected: list[tuple] = []
    for comm, quota in zip(cs.communities, quotas):
        if quota > len(comm):
            quota = len(comm)
            clamped += 1
        ranked = sorted(comm, key=lambda lab: (-bc[lab], label_key(lab)))
        selected.append(tuple(ranked[:quota]))

    keep = [lab for sel in selected for lab in sel]
    sub = induced_subgraph(g, keep)
    edges_before = sub.edge_count
    degrees = sub.degrees()
    edges = list(sub.edges())
    removed = 0
    if edges_before > n_e:
        removed = edges_before - n_e
        rng = random.Random(rng_seed)
        edges = _prune_edges(edges, degrees, removed, prune_policy, rng)
    pruned = Graph.from_edges(edges, nodes=keep)

    isolated = [lab for lab in pruned.nodes() if pruned.degree(lab) == 0]
    survivors = induced_subgraph(pruned, [lab for lab in pruned.nodes() if pruned.degree(lab) > 0])
    if survivors.n == 0:
        raise GraphError("sparsification removed every edge; nothing survives the LCC pass")
    n_components = len(connected_components(survivors))
    lcc = largest_component(survivors)

    ordered = sorted(lcc.nodes(), key=label_key)
    node_map = {new: orig for new, orig in enumerate(ordered)}
    relabel = {orig: new for new, orig in node_map.items()}
    working = Graph.from_edges(
        [(relabel[u], relabel[v]) for u, v in lcc.edges()],
        nodes=list(range(len(ordered))),
    )
    report = PruneReport(
        edges_before=edges_before,
        edges_removed=removed,
        isolated_removed=len(isolated),
        components_dropped=n_components - 1,
        quota_clamped=clamped,
    )
    return SparsifiedGraph(
        graph=working,
        node_map=node_map,
        quotas=tuple(min(q, len(c)) for q, c in zip(quotas, cs.communities)),
        selected=tuple(selected),
        prune_report=report,
        sparsified=True,
    )


def sparsify_if_large(
    g: Graph,
    cs: CommunityStructure,
    n_v: int,
    n_e: int,
    prune_policy: str = "random",
    rng_seed: int = 0,
) -> SparsifiedGraph:
    """Sparsify only when BOTH |V| > n_v and |E| > n_e hold strictly;
    otherwise wrap the graph unchanged with an identity node map."""
    if g.n > n_v and g.edge_count > n_e:
        return sparsify(g, cs, n_v, n_e, prune_policy, rng_seed)
    return SparsifiedGraph.passthrough(g)


# -- serialization -------------------------------------------------------------


def serialize_node_map(sg: SparsifiedGraph) -> str:
    lines = [f"{work} {orig}" for work, orig in sorted(sg.node_map.items(), key=lambda kv: label_key(kv[0]))]
    return "\n".join(lines) + "\n"


def write_sparsified(sg: SparsifiedGraph, directory) -> list[str]:
    """Edge list + node map + prune report JSON under ``directory``."""
    import os

    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, content in (
        ("sparsified.edges", serialize_edge_list(sg.graph)),
        ("node_map.txt", serialize_node_map(sg)),
        ("prune_report.json", json.dumps(asdict(sg.prune_report), sort_keys=True, indent=2) + "\n"),
    ):
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
        paths.append(path)
    return paths
