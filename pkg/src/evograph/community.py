"""Community detection (greedy modularity agglomeration) and the two merging
stages that shrink a partition to a workable number of communities."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from evograph.graph import Graph, GraphError, Label, label_key


@dataclass(frozen=True)
class CommunityStructure:
    """Disjoint partition of a graph's nodes.

    ``communities`` is ordered by smallest member label so downstream quotas
    index it deterministically; ``assignment`` maps every label to its
    community's position in that tuple.
    """

    communities: tuple[frozenset, ...]
    assignment: dict

    @classmethod
    def from_sets(cls, sets) -> "CommunityStructure":
        comms = tuple(
            sorted((frozenset(s) for s in sets), key=lambda c: min(label_key(l) for l in c))
        )
        assignment = {}
        for idx, comm in enumerate(comms):
            if not comm:
                raise GraphError("empty community")
            for lab in comm:
                if lab in assignment:
                    raise GraphError(f"node {lab!r} assigned to two communities")
                assignment[lab] = idx
        return cls(comms, assignment)

    def validate(self, g: Graph) -> None:
        covered = set(self.assignment)
        if covered != set(g.nodes()):
            raise GraphError("communities do not partition the node set")

    def __len__(self) -> int:
        return len(self.communities)

    def community_of(self, label: Label) -> int:
        return self.assignment[label]


def serialize_communities(cs: CommunityStructure) -> str:
    """Two-column text: ``label community_index`` per line."""
    lines = []
    for idx, comm in enumerate(cs.communities):
        for lab in sorted(comm, key=label_key):
            lines.append(f"{lab} {idx}")
    return "\n".join(lines) + "\n"


def parse_communities(text: str) -> CommunityStructure:
    groups: dict[int, set] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        lab, idx = line.split()
        groups.setdefault(int(idx), set()).add(lab)
    return CommunityStructure.from_sets(groups.values())


def modularity(g: Graph, cs: CommunityStructure) -> float:
    """Newman modularity Q = sum_c [e_c/m - (deg_c / 2m)^2]."""
    m = g.edge_count
    if m == 0:
        raise GraphError("modularity undefined on an edgeless graph")
    cs.validate(g)
    intra = [0] * len(cs)
    deg = [0] * len(cs)
    for lab in g.nodes():
        deg[cs.community_of(lab)] += g.degree(lab)
    for u, v in g.edges():
        cu, cv = cs.community_of(u), cs.community_of(v)
        if cu == cv:
            intra[cu] += 1
    return sum(intra[c] / m - (deg[c] / (2.0 * m)) ** 2 for c in range(len(cs)))


def detect_fastgreedy(g: Graph) -> CommunityStructure:
    """Agglomerative modularity maximization (CNM).

    Start from singletons, repeatedly merge the connected community pair with
    the largest modularity gain (ties: smallest community-index pair), and cut
    the merge sequence at its global modularity peak. Disconnected graphs are
    handled naturally: cross-component merges never improve modularity, so
    each component agglomerates independently.
    """
    n = g.n
    if n == 0:
        raise GraphError("cannot detect communities of an empty graph")
    m = g.edge_count
    if m == 0:
        return CommunityStructure.from_sets([{lab} for lab in g.nodes()])

    two_m = 2.0 * m
    # Community ids start as node indices; a merge keeps the smaller id.
    alive: dict[int, set[int]] = {i: {i} for i in range(n)}
    deg_sum: dict[int, float] = {i: float(len(g.neighbor_indices(i))) for i in range(n)}
    links: dict[int, dict[int, int]] = {i: {} for i in range(n)}
    for i in range(n):
        for j in g.neighbor_indices(i):
            if i < j:
                links[i][j] = links[i].get(j, 0) + 1
                links[j][i] = links[j].get(i, 0) + 1

    def gain(i: int, j: int) -> float:
        return links[i][j] / m - 2.0 * (deg_sum[i] / two_m) * (deg_sum[j] / two_m)

    heap: list[tuple[float, int, int]] = []
    for i, row in links.items():
        for j in row:
            if i < j:
                heap.append((-gain(i, j), i, j))
    heapq.heapify(heap)

    q = -sum((deg_sum[i] / two_m) ** 2 for i in range(n))
    best_q = q
    merges: list[tuple[int, int]] = []
    best_step = 0

    while heap:
        neg_g, i, j = heapq.heappop(heap)
        if i not in alive or j not in alive or j not in links[i]:
            continue
        if -neg_g != gain(i, j):  # stale entry
            continue
        q += -neg_g
        merges.append((i, j))
        # fold j into i
        alive[i] |= alive.pop(j)
        deg_sum[i] += deg_sum.pop(j)
        for k, cnt in links.pop(j).items():
            if k == i:
                continue
            links[k].pop(j, None)
            links[i][k] = links[i].get(k, 0) + cnt
            links[k][i] = links[i][k]
        links[i].pop(j, None)
        for k in links[i]:
            a, b = (i, k) if i < k else (k, i)
            heapq.heappush(heap, (-gain(a, b), a, b))
        if q > best_q + 1e-12:
            best_q = q
            best_step = len(merges)

    # replay merges up to the modularity peak
    groups: dict[int, set[int]] = {i: {i} for i in range(n)}
    for i, j in merges[:best_step]:
        groups[i] |= groups.pop(j)
    sets = [{g.label_of(i) for i in members} for members in groups.values()]
    return CommunityStructure.from_sets(sets)


# -- merging ------------------------------------------------------------------


def _inter_community_edges(g: Graph, members: frozenset, cs_sets: list[frozenset]) -> list[int]:
    """Edge counts between ``members`` and each community in ``cs_sets``."""
    where = {}
    for idx, comm in enumerate(cs_sets):
        for lab in comm:
            where[lab] = idx
    counts = [0] * len(cs_sets)
    for u, v in g.edges():
        if (u in members) != (v in members):
            outside = v if u in members else u
            counts[where[outside]] += 1
    return counts


def _smallest(sets: list[frozenset]) -> int:
    return min(range(len(sets)), key=lambda i: (len(sets[i]), min(label_key(l) for l in sets[i])))


def _pick_target(g: Graph, sets: list[frozenset], src: int, eligible: list[int]) -> int:
    """Max inter-edge-count community among ``eligible`` (ties: smallest member
    label); zero connectivity everywhere falls back to the smallest eligible."""
    counts = _inter_community_edges(g, sets[src], sets)
    best_count = max(counts[i] for i in eligible)
    if best_count == 0:
        return min(eligible, key=lambda i: (len(sets[i]), min(label_key(l) for l in sets[i])))
    candidates = [i for i in eligible if counts[i] == best_count]
    return min(candidates, key=lambda i: min(label_key(l) for l in sets[i]))


def merge_to_target(
    g: Graph,
    cs: CommunityStructure,
    n_target: int,
    trace: list | None = None,
) -> CommunityStructure:
    """Fold the smallest community into its max-edge-count neighbor until
    exactly ``n_target`` communities remain.

    ``trace``, when given, collects one dict per merge step for auditing.
    """
    if n_target < 1:
        raise GraphError("target community count must be >= 1")
    if n_target > len(cs):
        raise GraphError(f"target {n_target} exceeds current community count {len(cs)}")
    sets = list(cs.communities)
    while len(sets) > n_target:
        src = _smallest(sets)
        eligible = [i for i in range(len(sets)) if i != src]
        counts = _inter_community_edges(g, sets[src], sets)
        target = _pick_target(g, sets, src, eligible)
        if trace is not None:
            trace.append(
                {
                    "merged": sets[src],
                    "into": sets[target],
                    "edge_counts": {idx: counts[idx] for idx in eligible},
                }
            )
        merged = sets[src] | sets[target]
        sets = [s for i, s in enumerate(sets) if i not in (src, target)] + [merged]
    return CommunityStructure.from_sets(sets)


def merge_small(g: Graph, cs: CommunityStructure, fraction: float) -> CommunityStructure:
    """Merge every community smaller than ``fraction * |V|`` into its
    max-edge-count neighbor among threshold-meeting communities.

    Processes smallest-first and re-evaluates after each merge; if no
    community meets the threshold nothing merges.
    """
    if not 0.0 < fraction < 1.0:
        raise GraphError("fraction must lie in (0, 1)")
    threshold = fraction * g.n
    sets = list(cs.communities)
    while True:
        undersized = [i for i in range(len(sets)) if len(sets[i]) < threshold]
        eligible = [i for i in range(len(sets)) if len(sets[i]) >= threshold]
        if not undersized or not eligible:
            break
        src = min(undersized, key=lambda i: (len(sets[i]), min(label_key(l) for l in sets[i])))
        target = _pick_target(g, sets, src, eligible)
        merged = sets[src] | sets[target]
        sets = [s for i, s in enumerate(sets) if i not in (src, target)] + [merged]
    return CommunityStructure.from_sets(sets)
