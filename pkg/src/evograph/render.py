"""Rasterize solution images: edges under colored node disks with centered
labels, styled per evolutionary phase. Rendering is pure, so identical inputs
produce byte-identical PNGs."""

from __future__ import annotations

import hashlib
import io
import json
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from PIL import Image, ImageDraw, ImageFont

from evograph.graph import Graph, GraphError, Label, serialize_edge_list
from evograph.layout import Layout, compute_layout

PHASES = ("init", "crossover", "mutation")

SOLUTION_COLOR = "#2F7FC1"
NONSOLUTION_COLOR = "#FFFFFF"


@dataclass(frozen=True)
class RenderSpec:
    canvas: tuple[int, int] = (1200, 1200)
    node_radius_px: int = 17  # marker size 35 in plotting-library units, ~35 px diameter
    label_pt: int = 22
    solution_color: str = SOLUTION_COLOR
    nonsolution_color: str = NONSOLUTION_COLOR
    background: str = "#FFFFFF"
    edge_color: str = "#D3D3D3"
    outline_color: str = "#333333"
    outline_px: int = 2
    label_mode: str | None = None  # None = phase default; else all_nodes | solution_only


def _hex_to_rgb(value: str) -> tuple[int, int, int]:
    value = value.lstrip("#")
    return tuple(int(value[i : i + 2], 16) for i in (0, 2, 4))


@lru_cache(maxsize=8)
def _font(size: int):
    try:
        return ImageFont.load_default(size=size)
    except TypeError:  # very old Pillow: fixed-size bitmap fallback
        return ImageFont.load_default()


def _draw_centered_text(draw: ImageDraw.ImageDraw, xy, text: str, fill, size: int) -> None:
    font = _font(size)
    try:
        draw.text(xy, text, fill=fill, font=font, anchor="mm")
    except (ValueError, TypeError):
        left, top, right, bottom = draw.textbbox((0, 0), text, font=font)
        w, h = right - left, bottom - top
        draw.text((xy[0] - w / 2 - left, xy[1] - h / 2 - top), text, fill=fill, font=font)


def render_solution_image(
    g: Graph,
    layout: Layout,
    spec: RenderSpec,
    solution: Iterable[Label] = (),
    phase: str = "init",
) -> Image.Image:
    """Phase styling:

    - init: every node solution-colored and labeled
    - crossover: every node solution-colored, only solution nodes labeled
    - mutation: solution nodes colored, others white with a dark outline,
      every node labeled
    """
    if phase not in PHASES:
        raise GraphError(f"unknown phase {phase!r}")
    solution = tuple(solution)
    for lab in solution:
        if not g.has_node(lab):
            raise GraphError(f"solution node {lab!r} is not in the graph")
    for lab in g.nodes():
        if lab not in layout.positions:
            raise GraphError(f"layout is missing node {lab!r}")

    img = Image.new("RGB", spec.canvas, _hex_to_rgb(spec.background))
    draw = ImageDraw.Draw(img)
    for u, v in g.edges():
        draw.line(
            [layout.positions[u], layout.positions[v]],
            fill=_hex_to_rgb(spec.edge_color),
            width=2,
        )

    in_solution = set(solution)
    r = spec.node_radius_px
    sol_rgb = _hex_to_rgb(spec.solution_color)
    non_rgb = _hex_to_rgb(spec.nonsolution_color)
    if spec.label_mode is not None:
        label_all = spec.label_mode == "all_nodes"
    else:
        label_all = phase in ("init", "mutation")

    for lab in g.nodes():
        x, y = layout.positions[lab]
        if phase in ("init", "crossover"):
            fill, outline, width = sol_rgb, None, 0
            text_fill = (255, 255, 255)
        else:  # mutation
            if lab in in_solution:
                fill, outline, width = sol_rgb, None, 0
                text_fill = (255, 255, 255)
            else:
                fill = non_rgb
                outline, width = _hex_to_rgb(spec.outline_color), spec.outline_px
                text_fill = (0, 0, 0)
        draw.ellipse([x - r, y - r, x + r, y + r], fill=fill, outline=outline, width=width)
        if label_all or lab in in_solution:
            _draw_centered_text(draw, (x, y), str(lab), text_fill, spec.label_pt)
    return img


def png_bytes(img: Image.Image) -> bytes:
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def graph_content_hash(g: Graph) -> str:
    return hashlib.sha256(serialize_edge_list(g).encode()).hexdigest()[:16]


class SolutionRenderer:
    """Bundles a graph with one layout per run so every generation draws on
    identical geometry; optionally persists layout and rendered frames.

    Layout positions are cached in memory keyed by (graph hash, style, seed)
    and, when ``out_dir`` is set, mirrored to a JSON sidecar plus PNG files
    named ``{generation}/{individual}_{phase}.png``.
    """

    _layout_cache: dict[tuple, Layout] = {}

    def __init__(
        self,
        g: Graph,
        style: str = "KK",
        rng_seed: int = 0,
        spec: RenderSpec | None = None,
        out_dir: str | None = None,
    ):
        self.graph = g
        self.style = style
        self.spec = spec or RenderSpec()
        self.out_dir = out_dir
        key = (graph_content_hash(g), style, rng_seed if style == "FR" else 0)
        cached = self._layout_cache.get(key)
        if cached is None:
            cached = compute_layout(g, style, rng_seed)
            self._layout_cache[key] = cached
        self.layout = cached
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
            sidecar = os.path.join(out_dir, f"layout_{key[0]}_{style}.json")
            if not os.path.exists(sidecar):
                payload = {str(lab): pos for lab, pos in self.layout.positions.items()}
                with open(sidecar, "w", encoding="utf-8") as fh:
                    json.dump({"style": style, "positions": payload}, fh, sort_keys=True)

    def render(
        self,
        solution: Iterable[Label] = (),
        phase: str = "init",
        generation: int | None = None,
        individual: str | int | None = None,
    ) -> Image.Image:
        img = render_solution_image(self.graph, self.layout, self.spec, solution, phase)
        if self.out_dir is not None and generation is not None and individual is not None:
            directory = os.path.join(self.out_dir, str(generation))
            os.makedirs(directory, exist_ok=True)
            img.save(os.path.join(directory, f"{individual}_{phase}.png"), format="PNG")
        return img
