"""Physical layout: node boxes, shaft clipping, and label anchors.

Everything in this module works in points with the y axis pointing up;
the SVG emitter flips the sign at the very end.  Scenes come in with
exact integer coordinates, so positions convert to floats once, here,
and every later stage is pure float geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arrows import resolve_compass
from .errors import NODES_OVERLAP, DiagnosticError
from .lowering import LEFT, MID, NO_SIDE, resolve_label_side
from .metrics import MetricsTable
from .model import (
    UNIT_EM,
    ArrowInstance,
    ArrowStyle,
    InlineFragment,
    NodeInstance,
    RenderConfig,
    Scene,
    to_physical,
)

__all__ = [
    'NodeBox', 'Label', 'ResolvedArrow', 'ResolvedScene',
    'node_box', 'resolve_scene',
]

Point = tuple[float, float]


@dataclass(frozen=True)
class NodeBox:
    """Clip rectangle (margin included) and text origin of one node."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float
    text_x: float       # center of the text run
    baseline_y: float
    text: str
    phantom: bool = False


@dataclass(frozen=True)
class Label:
    """A placed arrow label; x, y is the center of its text box."""

    x: float
    y: float
    text: str
    side: str           # left | right | mid
    width: float
    height: float
    backing: tuple[float, float, float, float] | None = None


@dataclass(frozen=True)
class ResolvedArrow:
    start: Point
    end: Point
    style: ArrowStyle
    labels: tuple[Label, ...] = ()
    controls: tuple[Point, Point] | None = None
    tip_scale: float = 1.0

    @property
    def is_loop(self) -> bool:
        return self.controls is not None


@dataclass(frozen=True)
class ResolvedScene:
    boxes: tuple[NodeBox, ...]
    arrows: tuple[ResolvedArrow, ...]


def node_box(node: NodeInstance, metrics: MetricsTable,
             cfg: RenderConfig) -> NodeBox:
    """Box a node's text at its position, honoring the anchor letters.

    The baseline sits one axis height below the reference point so that
    text centers on the math axis.  Empty text gives a zero size box at
    the baseline; the margin still inflates it so arrows keep a small
    standoff from bare coordinates with named extents.
    """
    rx, ry = to_physical(node.pos, cfg)
    scale = cfg.em_pt / 1000.0
    if node.text:
        width = metrics.measure(node.text, cfg)
        ascent = metrics.ascent * scale
        descent = metrics.descent * scale
    else:
        width = ascent = descent = 0.0
    baseline = ry - cfg.axis
    dx = dy = 0.0
    if node.anchor != 'center':
        for ch in node.anchor:
            if ch == 'l':
                dx = width / 2.0
            elif ch == 'r':
                dx = -width / 2.0
            elif ch == 'u':
                dy = ry - (baseline + ascent)
            elif ch == 'd':
                dy = ry - (baseline - descent)
    m = cfg.object_margin_pt
    return NodeBox(
        rx + dx - width / 2.0 - m, baseline + dy - descent - m,
        rx + dx + width / 2.0 + m, baseline + dy + ascent + m,
        rx + dx, baseline + dy, node.text, node.phantom)


def _exit_param(box: NodeBox, px: float, py: float, dx: float,
                dy: float) -> float:
    """Parameter t at which the ray (px, py) + t (dx, dy) leaves box."""
    t = math.inf
    if dx > 0.0:
        t = min(t, (box.max_x - px) / dx)
    elif dx < 0.0:
        t = min(t, (box.min_x - px) / dx)
    if dy > 0.0:
        t = min(t, (box.max_y - py) / dy)
    elif dy < 0.0:
        t = min(t, (box.min_y - py) / dy)
    return t


def _label_metrics(text: str, metrics: MetricsTable,
                   cfg: RenderConfig) -> tuple[float, float]:
    width = metrics.text_advance(text, cfg.label_scale) * cfg.em_pt / 1000.0
    height = metrics.box_height_milli_em() * cfg.label_scale * cfg.em_pt / 1000.0
    return width, height


def _place_label(text: str, side: str, start: Point, end: Point,
                 metrics: MetricsTable, cfg: RenderConfig) -> Label:
    mx = (start[0] + end[0]) / 2.0
    my = (start[1] + end[1]) / 2.0
    width, height = _label_metrics(text, metrics, cfg)
    if side == MID:
        backing = (mx - width / 2.0 - 1.0, my - height / 2.0 - 4.0,
                   mx + width / 2.0 + 1.0, my + height / 2.0 + 4.0)
        return Label(mx, my, text, side, width, height, backing)
    dx = end[0] - start[0]
    dy = end[1] - start[1]
    length = math.hypot(dx, dy)
    nx, ny = -dy / length, dx / length
    if side != LEFT:
        nx, ny = -nx, -ny
    reach = height / 2.0 + cfg.label_gap_pt
    return Label(mx + nx * reach, my + ny * reach, text, side, width, height)


def _offset(p: Point, nx: float, ny: float, amount: float) -> Point:
    return (p[0] + nx * amount, p[1] + ny * amount)


def _resolve_segment(arrow: ArrowInstance,
                     by_pos: dict[tuple[int, int], NodeBox],
                     metrics: MetricsTable,
                     cfg: RenderConfig) -> ResolvedArrow:
    p0 = to_physical(arrow.src, cfg)
    p1 = to_physical(arrow.dst, cfg)
    dx = p1[0] - p0[0]
    dy = p1[1] - p0[1]
    t0, t1 = 0.0, 1.0
    if arrow.src_text is not None:
        box = by_pos.get((arrow.src.x, arrow.src.y))
        if box is not None:
            t0 = _exit_param(box, p0[0], p0[1], dx, dy)
    if arrow.dst_text is not None:
        box = by_pos.get((arrow.dst.x, arrow.dst.y))
        if box is not None:
            t1 = 1.0 - _exit_param(box, p1[0], p1[1], -dx, -dy)
    if t0 >= t1:
        raise DiagnosticError(
            NODES_OVERLAP,
            "the boxes around '%s' and '%s' overlap; no room is left for "
            'the arrow between them' % (arrow.src_text, arrow.dst_text))
    start = (p0[0] + t0 * dx, p0[1] + t0 * dy)
    end = (p0[0] + t1 * dx, p0[1] + t1 * dy)
    shift = arrow.style.parallel_offset_pt
    if shift:
        length = math.hypot(dx, dy)
        nx, ny = -dy / length, dx / length
        start = _offset(start, nx, ny, shift)
        end = _offset(end, nx, ny, shift)
    labels = ()
    if arrow.label:
        sdx, sdy = arrow.span()
        side = resolve_label_side(arrow.label_rule, sdx, sdy)
        if side != NO_SIDE:
            labels = (_place_label(arrow.label, side, start, end,
                                   metrics, cfg),)
    return ResolvedArrow(start, end, arrow.style, labels)


def _resolve_loop(arrow: ArrowInstance,
                  by_pos: dict[tuple[int, int], NodeBox],
                  cfg: RenderConfig) -> ResolvedArrow:
    box = by_pos[(arrow.src.x, arrow.src.y)]
    rx, ry = to_physical(arrow.src, cfg)
    ox, oy = resolve_compass(arrow.loop_out)
    ix, iy = resolve_compass(arrow.loop_in)
    t_out = _exit_param(box, rx, ry, ox, oy)
    t_in = _exit_param(box, rx, ry, ix, iy)
    start = (rx + ox * t_out, ry + oy * t_out)
    end = (rx + ix * t_in, ry + iy * t_in)
    reach = cfg.loop_reach_em * cfg.em_pt
    controls = ((start[0] + ox * reach, start[1] + oy * reach),
                (end[0] + ix * reach, end[1] + iy * reach))
    return ResolvedArrow(start, end, arrow.style, (), controls)


def _resolve_inline(fragment: InlineFragment, metrics: MetricsTable,
                    cfg: RenderConfig) -> list[ResolvedArrow]:
    unit = fragment.unit_scale * UNIT_EM * cfg.em_pt
    start = (0.0, fragment.raise_pt)
    end = (fragment.end.x * unit, fragment.end.y * unit + fragment.raise_pt)
    dx = end[0] - start[0]
    dy = end[1] - start[1]
    length = math.hypot(dx, dy)
    nx, ny = -dy / length, dx / length
    arrows = []
    for part in fragment.parts:
        shift = part.style.parallel_offset_pt
        s = _offset(start, nx, ny, shift)
        e = _offset(end, nx, ny, shift)
        labels = []
        if part.sup:
            labels.append(_place_label(part.sup, 'left', s, e, metrics, cfg))
        if part.sub:
            labels.append(_place_label(part.sub, 'right', s, e, metrics, cfg))
        if part.mid:
            labels.append(_place_label(part.mid, 'mid', s, e, metrics, cfg))
        arrows.append(ResolvedArrow(s, e, part.style, tuple(labels),
                                    tip_scale=fragment.tip_scale))
    return arrows


def resolve_scene(scene: Scene, metrics: MetricsTable | None = None,
                  cfg: RenderConfig | None = None) -> ResolvedScene:
    """Turn one scene unit into drawable boxes and arrow segments."""
    if metrics is None:
        metrics = MetricsTable.builtin()
    if cfg is None:
        cfg = RenderConfig()
    boxes = tuple(node_box(n, metrics, cfg) for n in scene.nodes)
    by_pos: dict[tuple[int, int], NodeBox] = {}
    for node, box in zip(scene.nodes, boxes):
        by_pos.setdefault((node.pos.x, node.pos.y), box)
    arrows: list[ResolvedArrow] = []
    for arrow in scene.arrows:
        if arrow.is_loop:
            arrows.append(_resolve_loop(arrow, by_pos, cfg))
        else:
            arrows.append(_resolve_segment(arrow, by_pos, metrics, cfg))
    for fragment in scene.inlines:
        arrows.extend(_resolve_inline(fragment, metrics, cfg))
    return ResolvedScene(boxes, tuple(arrows))
