"""Standalone SVG rendering of resolved scenes.

The emitted documents carry no scripts, no external references, and no
randomness; elements appear in a fixed order (arrows back to front, node
texts on top) with coordinates printed through one float formatter, so
output is reproducible byte for byte.

Layout hands over y-up coordinates; the flip to SVG's y-down happens at
the last moment, inside the writers.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

from .layout import Label, NodeBox, ResolvedArrow, ResolvedScene, resolve_scene
from .metrics import MetricsTable
from .model import RenderConfig, Scene

__all__ = ['render', 'render_resolved']

_STROKE = 0.4        # rule thickness, pt
_TIP_LEN = 4.0       # chevron depth, pt
_TIP_HALF = 1.5      # chevron half width, pt
_HEAD_GAP = 1.5      # spacing between the two chevrons of a double head
_HOOK_R = 1.5        # hook half circle radius
_BAR_HALF = 1.5      # half length of bar and tick strokes
_DOUBLE_GAP = 0.8    # half distance between double shaft rules
_PAD = 5.0           # whitespace around the drawing
_FONT = "Georgia, 'Times New Roman', serif"

_DASH = {'dashed': '4 2', 'dotted': '1 2'}

Point = tuple[float, float]


def _fmt(v: float) -> str:
    text = '%.3f' % v
    text = text.rstrip('0').rstrip('.')
    return '0' if text in ('-0', '') else text


def _unit(a: Point, b: Point) -> Point:
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(dx, dy)
    return (dx / length, dy / length)


def _at(p: Point, u: Point, t: float) -> Point:
    return (p[0] + u[0] * t, p[1] + u[1] * t)


def _stroke_attrs(extra: dict | None = None) -> dict:
    attrs = {'stroke': '#000', 'stroke-width': _fmt(_STROKE), 'fill': 'none'}
    if extra:
        attrs.update(extra)
    return attrs


class _Writer:
    """Accumulates elements for one unit, flipping y on the way in."""

    def __init__(self, metrics: MetricsTable, cfg: RenderConfig):
        self.metrics = metrics
        self.cfg = cfg
        self.root = ET.Element('svg')
        self.arrows = ET.SubElement(self.root, 'g', {'class': 'arrows'})
        self.nodes = ET.SubElement(self.root, 'g', {'class': 'nodes'})

    def line(self, parent, cls: str, a: Point, b: Point,
             dash: str | None = None) -> None:
        attrs = {'class': cls}
        attrs.update({'x1': _fmt(a[0]), 'y1': _fmt(-a[1]),
                      'x2': _fmt(b[0]), 'y2': _fmt(-b[1])})
        attrs.update(_stroke_attrs())
        if dash:
            attrs['stroke-dasharray'] = dash
        ET.SubElement(parent, 'line', attrs)

    def path(self, parent, cls: str, d: str, filled: bool = False,
             dash: str | None = None) -> None:
        attrs = {'class': cls, 'd': d}
        if filled:
            attrs['fill'] = '#000'
        else:
            attrs.update(_stroke_attrs())
            if dash:
                attrs['stroke-dasharray'] = dash
        ET.SubElement(parent, 'path', attrs)

    def move_line(self, a: Point, b: Point) -> str:
        return 'M %s %s L %s %s' % (_fmt(a[0]), _fmt(-a[1]),
                                    _fmt(b[0]), _fmt(-b[1]))

    def text(self, parent, cls: str, x: float, baseline_y: float,
             content: str, size: float) -> None:
        el = ET.SubElement(parent, 'text', {
            'class': cls, 'x': _fmt(x), 'y': _fmt(-baseline_y),
            'text-anchor': 'middle', 'font-size': _fmt(size)})
        el.text = content


def render(scene: Scene, metrics: MetricsTable | None = None,
           cfg: RenderConfig | None = None) -> str:
    """Render one scene unit to SVG text."""
    if metrics is None:
        metrics = MetricsTable.builtin()
    if cfg is None:
        cfg = RenderConfig()
    return render_resolved(resolve_scene(scene, metrics, cfg), metrics, cfg)


def render_resolved(resolved: ResolvedScene, metrics: MetricsTable,
                    cfg: RenderConfig) -> str:
    w = _Writer(metrics, cfg)
    for arrow in resolved.arrows:
        _emit_arrow(w, arrow)
    for box in resolved.boxes:
        if box.text and not box.phantom:
            w.text(w.nodes, 'node', box.text_x, box.baseline_y, box.text,
                   cfg.em_pt)
    _set_frame(w.root, _bounds(resolved))
    ET.indent(w.root, space='  ')
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            + ET.tostring(w.root, encoding='unicode') + '\n')


def _set_frame(root: ET.Element,
               bounds: tuple[float, float, float, float] | None) -> None:
    if bounds is None:
        min_x, min_y, max_x, max_y = 0.0, -10.0, 10.0, 0.0
    else:
        min_x, min_y, max_x, max_y = bounds
        min_x -= _PAD
        min_y -= _PAD
        max_x += _PAD
        max_y += _PAD
    width = max_x - min_x
    height = max_y - min_y
    # y flips: the top of the viewBox is the largest y-up coordinate
    attrs = {
        'xmlns': 'http://www.w3.org/2000/svg',
        'version': '1.1',
        'viewBox': '%s %s %s %s' % (_fmt(min_x), _fmt(-max_y),
                                    _fmt(width), _fmt(height)),
        'width': _fmt(width) + 'pt',
        'height': _fmt(height) + 'pt',
        'font-family': _FONT,
    }
    for key, value in attrs.items():
        root.set(key, value)


def _bounds(resolved: ResolvedScene
            ) -> tuple[float, float, float, float] | None:
    xs: list[float] = []
    ys: list[float] = []
    for box in resolved.boxes:
        xs += [box.min_x, box.max_x]
        ys += [box.min_y, box.max_y]
    for arrow in resolved.arrows:
        points = [arrow.start, arrow.end]
        if arrow.controls:
            points += list(arrow.controls)
        for px, py in points:
            xs.append(px)
            ys.append(py)
        for label in arrow.labels:
            rect = label.backing or (
                label.x - label.width / 2.0, label.y - label.height / 2.0,
                label.x + label.width / 2.0, label.y + label.height / 2.0)
            xs += [rect[0], rect[2]]
            ys += [rect[1], rect[3]]
    if not xs:
        return None
    return min(xs), min(ys), max(xs), max(ys)


# ---- arrows -----------------------------------------------------------


def _emit_arrow(w: _Writer, arrow: ResolvedArrow) -> None:
    g = ET.SubElement(w.arrows, 'g', {'class': 'arrow'})
    style = arrow.style
    start, end = arrow.start, arrow.end
    if arrow.is_loop:
        c1, c2 = arrow.controls
        u_start = _unit(start, c1)
        u_end = _unit(c2, end)
    else:
        u_start = u_end = _unit(start, end)
    # decoration ends: the head family draws where the style points,
    # which is the start for reversed specs
    if style.reversed:
        head_pos, head_out = start, (-u_start[0], -u_start[1])
        tail_pos, tail_in = end, (-u_end[0], -u_end[1])
    else:
        head_pos, head_out = end, u_end
        tail_pos, tail_in = start, u_start
    tip = _TIP_LEN * arrow.tip_scale
    shaft_start, shaft_end = start, end
    if not arrow.is_loop and style.tail in ('mono', 'hook_up', 'hook_down'):
        # open tail glyphs own the first tip length of the shaft
        if style.reversed:
            shaft_end = _at(end, u_end, -tip)
        else:
            shaft_start = _at(start, u_start, tip)
    _emit_shaft(w, g, arrow, style.shaft, shaft_start, shaft_end)
    if style.head != 'none':
        _emit_head(w, g, style.head, head_pos, head_out, arrow.tip_scale)
    if style.tail != 'none':
        _emit_tail(w, g, style.tail, tail_pos, tail_in, arrow.tip_scale)
    if style.mid != 'none' and not arrow.is_loop:
        _emit_mid(w, g, style.mid, start, end, u_start)
    for label in arrow.labels:
        _emit_label(w, g, label)


def _emit_shaft(w: _Writer, g, arrow: ResolvedArrow, shaft: str,
                a: Point, b: Point) -> None:
    if shaft == 'invisible':
        return
    if arrow.is_loop:
        c1, c2 = arrow.controls
        d = 'M %s %s C %s %s, %s %s, %s %s' % (
            _fmt(a[0]), _fmt(-a[1]), _fmt(c1[0]), _fmt(-c1[1]),
            _fmt(c2[0]), _fmt(-c2[1]), _fmt(b[0]), _fmt(-b[1]))
        w.path(g, 'shaft', d, dash=_DASH.get(shaft))
        return
    if shaft == 'double':
        u = _unit(a, b)
        nx, ny = -u[1], u[0]
        for side in (_DOUBLE_GAP, -_DOUBLE_GAP):
            w.line(g, 'shaft', (a[0] + nx * side, a[1] + ny * side),
                   (b[0] + nx * side, b[1] + ny * side))
        return
    w.line(g, 'shaft', a, b, dash=_DASH.get(shaft))


def _chevron(p: Point, out: Point, scale: float) -> str:
    """Filled chevron with its point at p, opening against ``out``."""
    nx, ny = -out[1], out[0]
    back = _at(p, out, -_TIP_LEN * scale)
    notch = _at(p, out, -_TIP_LEN * 0.6 * scale)
    half = _TIP_HALF * scale
    b1 = (back[0] + nx * half, back[1] + ny * half)
    b2 = (back[0] - nx * half, back[1] - ny * half)
    return 'M %s %s L %s %s L %s %s L %s %s Z' % (
        _fmt(p[0]), _fmt(-p[1]), _fmt(b1[0]), _fmt(-b1[1]),
        _fmt(notch[0]), _fmt(-notch[1]), _fmt(b2[0]), _fmt(-b2[1]))


def _emit_head(w: _Writer, g, head: str, p: Point, out: Point,
               scale: float) -> None:
    w.path(g, 'head', _chevron(p, out, scale), filled=True)
    if head == 'double_head':
        w.path(g, 'head', _chevron(_at(p, out, -_HEAD_GAP * scale), out,
                                   scale), filled=True)


def _emit_tail(w: _Writer, g, tail: str, p: Point, inward: Point,
               scale: float) -> None:
    nx, ny = -inward[1], inward[0]
    half = _TIP_HALF * scale
    if tail == 'bar':
        w.line(g, 'tail', (p[0] + nx * _BAR_HALF, p[1] + ny * _BAR_HALF),
               (p[0] - nx * _BAR_HALF, p[1] - ny * _BAR_HALF))
        return
    if tail == 'mono':
        vertex = _at(p, inward, _TIP_LEN * scale)
        b1 = (p[0] + nx * half, p[1] + ny * half)
        b2 = (p[0] - nx * half, p[1] - ny * half)
        d = 'M %s %s L %s %s L %s %s' % (
            _fmt(b1[0]), _fmt(-b1[1]), _fmt(vertex[0]), _fmt(-vertex[1]),
            _fmt(b2[0]), _fmt(-b2[1]))
        w.path(g, 'tail', d)
        return
    # hooks: a half circle between the boundary point and a point one
    # diameter along the shaft, bulging to one side
    far = _at(p, inward, 2.0 * _HOOK_R * scale)
    sweep = '1' if tail == 'hook_up' else '0'
    d = 'M %s %s A %s %s 0 0 %s %s %s' % (
        _fmt(p[0]), _fmt(-p[1]), _fmt(_HOOK_R * scale),
        _fmt(_HOOK_R * scale), sweep, _fmt(far[0]), _fmt(-far[1]))
    w.path(g, 'tail', d)


def _emit_mid(w: _Writer, g, mid: str, start: Point, end: Point,
              u: Point) -> None:
    cx = (start[0] + end[0]) / 2.0
    cy = (start[1] + end[1]) / 2.0
    nx, ny = -u[1], u[0]
    if mid == 'tick':
        w.line(g, 'mid', (cx + nx * _BAR_HALF, cy + ny * _BAR_HALF),
               (cx - nx * _BAR_HALF, cy - ny * _BAR_HALF))
        return
    # cross: two ticks at 45 degrees either side of the perpendicular
    for sx, sy in ((nx + u[0], ny + u[1]), (nx - u[0], ny - u[1])):
        length = math.hypot(sx, sy)
        vx, vy = sx / length * _BAR_HALF, sy / length * _BAR_HALF
        w.line(g, 'mid', (cx + vx, cy + vy), (cx - vx, cy - vy))


def _emit_label(w: _Writer, g, label: Label) -> None:
    if label.backing is not None:
        min_x, min_y, max_x, max_y = label.backing
        ET.SubElement(g, 'rect', {
            'class': 'backing', 'x': _fmt(min_x), 'y': _fmt(-max_y),
            'width': _fmt(max_x - min_x), 'height': _fmt(max_y - min_y),
            'fill': '#fff'})
    size = w.cfg.em_pt * w.cfg.label_scale
    ascent = w.metrics.ascent * size / 1000.0
    baseline = label.y + label.height / 2.0 - ascent
    w.text(g, 'label', label.x, baseline, label.text, size)
