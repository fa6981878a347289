"""Deterministic 2D layouts: stress-minimizing (KK style) and force-directed
(FR style), both scaled into pixel coordinates with a fixed canvas margin."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from evograph.graph import Graph, GraphError, is_connected

CANVAS = (1200, 1200)
MARGIN_FRAC = 0.08

KK_MAX_ITER = 1000
KK_TOL = 1e-6
FR_ITERATIONS = 200


@dataclass(frozen=True)
class Layout:
    positions: dict  # label -> (x, y) canvas pixels
    style_name: str  # "KK" or "FR"


def _graph_distances(g: Graph) -> np.ndarray:
    n = g.n
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in g.neighbor_indices(u):
                    if dist[s, v] < 0:
                        dist[s, v] = d
                        nxt.append(v)
            frontier = nxt
    return dist


def fit_to_canvas(points: np.ndarray, canvas=CANVAS, margin_frac=MARGIN_FRAC) -> np.ndarray:
    """Uniformly scale and translate into the canvas minus margins; degenerate
    spans (single node, collinear axes) center on that axis."""
    w, h = canvas
    mx, my = w * margin_frac, h * margin_frac
    avail = np.array([w - 2 * mx, h - 2 * my])
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = hi - lo
    scales = [avail[d] / span[d] for d in range(2) if span[d] > 1e-12]
    scale = min(scales) if scales else 1.0
    scaled = (points - (lo + hi) / 2.0) * scale
    center = np.array([w / 2.0, h / 2.0])
    return scaled + center


def stress(points: np.ndarray, dist: np.ndarray) -> float:
    """Weighted squared error between graph and Euclidean distances
    (weights 1/d^2, the classic stress energy)."""
    n = len(points)
    if n < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    eu = np.sqrt((diff**2).sum(axis=2))
    iu = np.triu_indices(n, k=1)
    d = dist[iu].astype(float)
    e = eu[iu]
    return float((((e - d) / d) ** 2).sum())


def _stress_gradient(points: np.ndarray, dist: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    eu = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(eu, 1.0)
    d = dist.astype(float)
    np.fill_diagonal(d, 1.0)
    coef = 2.0 * (eu - d) / (d**2 * eu)
    np.fill_diagonal(coef, 0.0)
    return (coef[:, :, None] * diff).sum(axis=1)


def layout_kamada_kawai(g: Graph) -> Layout:
    """Gradient descent on the stress energy from a circular start.

    Deterministic (no randomness), monotone by construction: steps that do not
    reduce stress are halved away, so the final stress never exceeds the
    initial one.
    """
    if g.n == 0:
        raise GraphError("cannot lay out an empty graph")
    if g.n == 1:
        return Layout({g.label_of(0): (CANVAS[0] / 2.0, CANVAS[1] / 2.0)}, "KK")
    if not is_connected(g):
        raise GraphError("layout requires a connected graph; pass the largest component")
    dist = _graph_distances(g)
    n = g.n
    radius = dist.max() / 2.0 if dist.max() > 0 else 1.0
    angles = 2.0 * np.pi * np.arange(n) / n
    points = np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1)

    current = stress(points, dist)
    lr = 0.05 * radius
    for _ in range(KK_MAX_ITER):
        grad = _stress_gradient(points, dist)
        improved = False
        step = lr
        for _ in range(20):
            candidate = points - step * grad
            value = stress(candidate, dist)
            if value < current:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        delta = current - value
        points, current, lr = candidate, value, min(step * 1.2, radius)
        if delta < KK_TOL:
            break
    pixels = fit_to_canvas(points)
    return Layout({g.label_of(i): (float(x), float(y)) for i, (x, y) in enumerate(pixels)}, "KK")


def layout_fruchterman_reingold(g: Graph, rng_seed: int) -> Layout:
    """Classic force-directed iteration with linear cooling from a seeded
    uniform start; bit-reproducible for a fixed seed."""
    if g.n == 0:
        raise GraphError("cannot lay out an empty graph")
    if g.n == 1:
        return Layout({g.label_of(0): (CANVAS[0] / 2.0, CANVAS[1] / 2.0)}, "FR")
    if not is_connected(g):
        raise GraphError("layout requires a connected graph; pass the largest component")
    n = g.n
    rng = np.random.default_rng(rng_seed)
    points = rng.random((n, 2))
    k = np.sqrt(1.0 / n)
    edge_idx = np.array([(i, j) for i in range(n) for j in g.neighbor_indices(i) if i < j])
    temp = 0.1
    cool = temp / (FR_ITERATIONS + 1)
    for _ in range(FR_ITERATIONS):
        diff = points[:, None, :] - points[None, :, :]
        eu = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(eu, 1.0)
        repulse = (k**2 / eu**2)[:, :, None] * diff
        np.fill_diagonal(repulse[:, :, 0], 0.0)
        np.fill_diagonal(repulse[:, :, 1], 0.0)
        disp = repulse.sum(axis=1)
        if len(edge_idx):
            u, v = edge_idx[:, 0], edge_idx[:, 1]
            d = points[u] - points[v]
            dist = np.sqrt((d**2).sum(axis=1))
            dist[dist < 1e-12] = 1e-12
            pull = (dist / k)[:, None] * d
            np.add.at(disp, u, -pull)
            np.add.at(disp, v, pull)
        mag = np.sqrt((disp**2).sum(axis=1))
        mag[mag < 1e-12] = 1e-12
        limited = disp / mag[:, None] * np.minimum(mag, temp)[:, None]
        points = points + limited
        temp -= cool
    pixels = fit_to_canvas(points)
    return Layout({g.label_of(i): (float(x), float(y)) for i, (x, y) in enumerate(pixels)}, "FR")


def compute_layout(g: Graph, style: str, rng_seed: int = 0) -> Layout:
    if style == "KK":
        return layout_kamada_kawai(g)
    if style == "FR":
        return layout_fruchterman_reingold(g, rng_seed)
    raise GraphError(f"unknown layout style {style!r}")
