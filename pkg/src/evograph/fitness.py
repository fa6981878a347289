"""Fitness functions: closed-form expected diffusion value, a Monte-Carlo
independent-cascade estimator, and the dismantling objective."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from evograph.graph import Graph, GraphError, Label, connected_components, label_key

Objective = Literal["edv", "ic_spread", "dismantling"]


@dataclass(frozen=True)
class FitnessValue:
    value: float
    objective: Objective


def _validate_members(g: Graph, members: Iterable[Label]) -> tuple:
    out = []
    seen = set()
    for lab in members:
        if not g.has_node(lab):
            raise GraphError(f"seed node {lab!r} is not in the graph")
        if lab in seen:
            raise GraphError(f"duplicate seed node {lab!r}")
        seen.add(lab)
        out.append(lab)
    return tuple(out)


def edv(g: Graph, members: Iterable[Label], p: float) -> FitnessValue:
    """k plus, for each one-hop neighbor b of the seed set, the probability
    1 - (1-p)^delta(b) that at least one of its delta(b) seed edges fires."""
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"propagation probability {p} outside [0, 1]")
    seeds = _validate_members(g, members)
    seed_idx = {g.index_of(lab) for lab in seeds}
    fringe: dict[int, int] = {}
    for s in seed_idx:
        for v in g.neighbor_indices(s):
            if v not in seed_idx:
                fringe[v] = fringe.get(v, 0) + 1
    total = float(len(seeds))
    for delta in fringe.values():
        total += 1.0 - (1.0 - p) ** delta
    return FitnessValue(total, "edv")


def dismantling_fitness(g: Graph, members: Iterable[Label]) -> FitnessValue:
    """|V| minus the largest component size after removing the seed nodes."""
    seeds = set(_validate_members(g, members))
    remaining = [lab for lab in g.nodes() if lab not in seeds]
    if not remaining:
        return FitnessValue(float(g.n), "dismantling")
    from evograph.graph import induced_subgraph

    rest = induced_subgraph(g, remaining)
    largest = max(len(c) for c in connected_components(rest))
    return FitnessValue(float(g.n - largest), "dismantling")


def ic_simulate(
    g: Graph,
    members: Iterable[Label],
    p: float,
    trials: int,
    rng_seed: int,
) -> FitnessValue:
    """Mean activated count over seeded independent-cascade runs.

    Each newly activated node gets one chance per inactive neighbor; that is
    equivalent to drawing liveness for every directed edge up front and
    counting reachable nodes, which is what lets trials run as numpy batches.
    Bit-reproducible for a fixed seed.
    """
    if trials < 1:
        raise GraphError("trials must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"propagation probability {p} outside [0, 1]")
    seeds = _validate_members(g, members)
    n = g.n
    seed_idx = np.array(sorted(g.index_of(lab) for lab in seeds), dtype=np.int64)
    src, dst = [], []
    for i in range(n):
        for j in g.neighbor_indices(i):
            src.append(i)
            dst.append(j)
    if not src or p == 0.0:
        return FitnessValue(float(len(seeds)), "ic_spread")
    src_a = np.array(src, dtype=np.int64)
    dst_a = np.array(dst, dtype=np.int64)
    order = np.argsort(dst_a, kind="stable")
    src_sorted = src_a[order]
    dst_sorted = dst_a[order]
    targets, starts = np.unique(dst_sorted, return_index=True)

    rng = np.random.default_rng(rng_seed)
    n_edges = len(src)
    chunk = max(1, min(trials, int(4_000_000 // max(1, n_edges))))
    total_activated = 0.0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        live = rng.random((b, n_edges)) < p  # column i is edge (src_sorted[i] -> dst_sorted[i])
        reached = np.zeros((b, n), dtype=bool)
        reached[:, seed_idx] = True
        while True:
            attempts = live & reached[:, src_sorted]
            incoming = np.logical_or.reduceat(attempts, starts, axis=1)
            nxt = reached.copy()
            nxt[:, targets] |= incoming
            if np.array_equal(nxt, reached):
                break
            reached = nxt
        total_activated += float(reached.sum())
        done += b
    return FitnessValue(total_activated / trials, "ic_spread")


class FitnessEvaluator:
    """Caches fitness per canonical seed set; the engine re-evaluates whole
    populations every generation so hits dominate."""

    def __init__(self, g: Graph, objective: Objective, p: float = 0.05):
        if objective not in ("edv", "dismantling"):
            raise GraphError(f"unsupported evolution objective {objective!r}")
        self.graph = g
        self.objective: Objective = objective
        self.p = p
        self._cache: dict[tuple, float] = {}
        self.hits = 0
        self.misses = 0

    def evaluate(self, members: Iterable[Label]) -> float:
        key = tuple(sorted(members, key=label_key))
        cached = self._cache.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        if self.objective == "edv":
            value = edv(self.graph, key, self.p).value
        else:
            value = dismantling_fitness(self.graph, key).value
        self._cache[key] = value
        return value
