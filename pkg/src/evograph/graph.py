"""Undirected simple graphs with stable labels, plus the exact algorithms
(betweenness, components, induced subgraphs) every other module builds on.

Graphs are immutable after construction and safe to share across threads.
Node labels are opaque (ints or strings); every tie-break in the package
orders labels through :func:`label_key` so runs are reproducible.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

Label = int | str


class GraphError(ValueError):
    """Raised for structural errors (unknown nodes, empty inputs, ...)."""


class EdgeListFormatError(GraphError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, line_no: int, line: str, reason: str):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no
        self.line = line


def label_key(label: Label) -> tuple:
    """Total order over mixed int/str labels: numeric first, then lexicographic."""
    if isinstance(label, int) and not isinstance(label, bool):
        return (0, label, "")
    s = str(label)
    body = s[1:] if s[:1] in "+-" else s
    if body.isdigit():
        return (0, int(s), s)
    return (1, 0, s)


@dataclass(frozen=True)
class LoadReport:
    """What the edge-list loader saw: counts of dropped duplicates and self-loops."""

    nodes: int
    edges: int
    duplicate_edges: int
    self_loops: int


class Graph:
    """Undirected simple graph: dense internal indices, sorted neighbor lists.

    ``adj`` holds internal indices; labels map bijectively to indices and are
    preserved exactly as given at construction time.
    """

    __slots__ = ("_labels", "_index", "_adj", "_m")

    def __init__(self, labels: Sequence[Label], adj: Sequence[Sequence[int]], edge_count: int):
        self._labels: tuple[Label, ...] = tuple(labels)
        self._index: dict[Label, int] = {lab: i for i, lab in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise GraphError("duplicate node labels")
        self._adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self._m = int(edge_count)
        if sum(len(a) for a in self._adj) != 2 * self._m:
            raise GraphError("edge count inconsistent with adjacency")

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[Label, Label]],
        nodes: Iterable[Label] = (),
    ) -> "Graph":
        """Build a graph from (u, v) pairs; duplicates and self-loops are dropped.

        ``nodes`` seeds extra (possibly isolated) nodes; first-seen order
        assigns internal indices.
        """
        labels: list[Label] = []
        index: dict[Label, int] = {}

        def intern(lab: Label) -> int:
            i = index.get(lab)
            if i is None:
                i = len(labels)
                index[lab] = i
                labels.append(lab)
            return i

        for lab in nodes:
            intern(lab)
        seen: set[tuple[int, int]] = set()
        pairs: list[tuple[int, int]] = []
        for u, v in edges:
            iu, iv = intern(u), intern(v)
            if iu == iv:
                continue
            key = (iu, iv) if iu < iv else (iv, iu)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(key)
        adj: list[list[int]] = [[] for _ in labels]
        for iu, iv in pairs:
            adj[iu].append(iv)
            adj[iv].append(iu)
        return cls(labels, adj, len(pairs))

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._labels)

    @property
    def edge_count(self) -> int:
        return self._m

    def nodes(self) -> tuple[Label, ...]:
        return self._labels

    def has_node(self, label: Label) -> bool:
        return label in self._index

    def index_of(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise GraphError(f"unknown node {label!r}") from None

    def label_of(self, index: int) -> Label:
        return self._labels[index]

    def degree(self, label: Label) -> int:
        return len(self._adj[self.index_of(label)])

    def neighbors(self, label: Label) -> tuple[Label, ...]:
        return tuple(self._labels[j] for j in self._adj[self.index_of(label)])

    def neighbor_indices(self, index: int) -> tuple[int, ...]:
        return self._adj[index]

    def degrees(self) -> dict[Label, int]:
        return {lab: len(self._adj[i]) for i, lab in enumerate(self._labels)}

    def edges(self) -> Iterator[tuple[Label, Label]]:
        """Each undirected edge once, in internal-index order."""
        for i, neigh in enumerate(self._adj):
            for j in neigh:
                if i < j:
                    yield self._labels[i], self._labels[j]

    def structurally_equal(self, other: "Graph") -> bool:
        """Same node-label set and same edge set (order-insensitive)."""
        if set(self._labels) != set(other._labels):
            return False
        mine = {tuple(sorted((u, v), key=label_key)) for u, v in self.edges()}
        theirs = {tuple(sorted((u, v), key=label_key)) for u, v in other.edges()}
        return mine == theirs

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.edge_count})"


# -- edge-list I/O ----------------------------------------------------------


def load_edge_list(source: str | io.TextIOBase) -> tuple[Graph, LoadReport]:
    """Parse whitespace-separated edge-list text into a simple graph.

    Lines starting with ``#`` and blank lines are skipped. Self-loop lines
    register their node but add no edge; duplicates (either orientation) are
    dropped. Both drops are counted in the returned report.
    """
    text = source if isinstance(source, str) else source.read()
    labels: list[Label] = []
    index: dict[Label, int] = {}

    def intern(lab: Label) -> int:
        i = index.get(lab)
        if i is None:
            i = len(labels)
            index[lab] = i
            labels.append(lab)
        return i

    seen: set[tuple[int, int]] = set()
    pairs: list[tuple[int, int]] = []
    duplicates = 0
    self_loops = 0
    parsed_any = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListFormatError(line_no, raw, f"expected 2 tokens, got {len(tokens)}")
        parsed_any = True
        iu, iv = intern(tokens[0]), intern(tokens[1])
        if iu == iv:
            self_loops += 1
            continue
        key = (iu, iv) if iu < iv else (iv, iu)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)
    if not parsed_any:
        raise GraphError("empty edge list: no parseable lines")
    adj: list[list[int]] = [[] for _ in labels]
    for iu, iv in pairs:
        adj[iu].append(iv)
        adj[iv].append(iu)
    g = Graph(labels, adj, len(pairs))
    return g, LoadReport(g.n, g.edge_count, duplicates, self_loops)


def read_edge_list(path) -> tuple[Graph, LoadReport]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_edge_list(fh.read())


def serialize_edge_list(g: Graph) -> str:
    """Mirror of the loader's format; isolated nodes appear as self-loop lines
    so a load/serialize round trip is structurally lossless."""
    lines = []
    for u, v in sorted(
        (tuple(sorted((u, v), key=label_key)) for u, v in g.edges()),
        key=lambda e: (label_key(e[0]), label_key(e[1])),
    ):
        lines.append(f"{u} {v}")
    for lab in sorted(g.nodes(), key=label_key):
        if g.degree(lab) == 0:
            lines.append(f"{lab} {lab}")
    return "\n".join(lines) + "\n"


# -- components and subgraphs ------------------------------------------------


def connected_components(g: Graph) -> list[set[Label]]:
    """Components as label sets, ordered by (-size, smallest label)."""
    seen = [False] * g.n
    comps: list[set[Label]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in g.neighbor_indices(u):
                if not seen[v]:
                    seen[v] = True
                    comp.add(v)
                    stack.append(v)
        comps.append({g.label_of(i) for i in comp})
    comps.sort(key=lambda c: (-len(c), min(label_key(l) for l in c)))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(connected_components(g)) == 1


def induced_subgraph(g: Graph, keep: Iterable[Label]) -> Graph:
    """Subgraph on ``keep``: exactly the edges with both endpoints kept."""
    keep_set = set(keep)
    for lab in keep_set:
        if not g.has_node(lab):
            raise GraphError(f"unknown node {lab!r}")
    kept_labels = [lab for lab in g.nodes() if lab in keep_set]
    edges = [(u, v) for u, v in g.edges() if u in keep_set and v in keep_set]
    return Graph.from_edges(edges, nodes=kept_labels)


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component; size ties go to the
    component containing the smallest label."""
    if g.n == 0:
        raise GraphError("empty graph has no components")
    return induced_subgraph(g, connected_components(g)[0])


# -- betweenness centrality ---------------------------------------------------


def _csr_adjacency(g: Graph) -> sp.csr_matrix:
    rows, cols = [], []
    for i in range(g.n):
        for j in g.neighbor_indices(i):
            rows.append(i)
            cols.append(j)
    data = np.ones(len(rows), dtype=np.float64)
    return sp.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def betweenness(g: Graph) -> dict[Label, float]:
    """Exact unnormalized betweenness, each unordered pair counted once.

    Level-synchronized accumulation over every source (path counts forward,
    dependencies backward); the per-level sums run as sparse matvecs so large
    graphs stay tractable. Isolated nodes score 0.
    """
    if g.n == 0:
        raise GraphError("betweenness of an empty graph")
    n = g.n
    if g.edge_count == 0:
        return {lab: 0.0 for lab in g.nodes()}
    A = _csr_adjacency(g)
    bc = np.zeros(n)
    for s in range(n):
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        levels: list[np.ndarray] = [np.array([s], dtype=np.int64)]
        frontier = levels[0]
        d = 0
        while True:
            x = np.zeros(n)
            x[frontier] = sigma[frontier]
            t = A @ x
            new_mask = (dist < 0) & (t > 0)
            if not new_mask.any():
                break
            d += 1
            sigma[new_mask] = t[new_mask]
            dist[new_mask] = d
            frontier = np.flatnonzero(new_mask)
            levels.append(frontier)
        delta = np.zeros(n)
        for depth in range(len(levels) - 1, 0, -1):
            w = levels[depth]
            y = np.zeros(n)
            y[w] = (1.0 + delta[w]) / sigma[w]
            z = A @ y
            pred = levels[depth - 1]
            delta[pred] += sigma[pred] * z[pred]
        delta[s] = 0.0
        bc += delta
    bc /= 2.0
    return {lab: float(bc[i]) for i, lab in enumerate(g.nodes())}
