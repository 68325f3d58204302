"""Structured scene output.

One scene unit serializes to one JSON document with a fixed key order,
two-space indentation, and a trailing newline, so recompiling an
unchanged source yields byte-identical files.  Coordinates stay in
integer logical units; nothing here depends on the render configuration.
"""

from __future__ import annotations

import json

from .model import (
    ArrowInstance,
    ArrowStyle,
    InlineFragment,
    LogicalPoint,
    NodeInstance,
    Scene,
)

__all__ = ['scene_to_dict', 'dump_scene']


def _point(p: LogicalPoint) -> dict:
    return {'x': p.x, 'y': p.y}


def _style(style: ArrowStyle) -> dict:
    return {
        'tail': style.tail,
        'shaft': style.shaft,
        'head': style.head,
        'mid': style.mid,
        'parallel_offset_pt': style.parallel_offset_pt,
        'reversed': style.reversed,
    }


def _node(node: NodeInstance) -> dict:
    return {
        'pos': _point(node.pos),
        'text': node.text,
        'anchor': node.anchor,
        'phantom': node.phantom,
    }


def _arrow(arrow: ArrowInstance) -> dict:
    return {
        'from': _point(arrow.src),
        'to': _point(arrow.dst),
        'style': _style(arrow.style),
        'label': arrow.label,
        'label_rule': arrow.label_rule,
        'source_extent': arrow.src_text,
        'target_extent': arrow.dst_text,
        'loop_out': arrow.loop_out,
        'loop_in': arrow.loop_in,
    }


def _fragment(fragment: InlineFragment) -> dict:
    return {
        'kind': fragment.kind,
        'end': _point(fragment.end),
        'unit_scale': fragment.unit_scale,
        'tip_scale': fragment.tip_scale,
        'raise_pt': fragment.raise_pt,
        'arrows': [
            {'style': _style(part.style), 'sup': part.sup,
             'sub': part.sub, 'mid': part.mid}
            for part in fragment.parts
        ],
    }


def scene_to_dict(scene: Scene) -> dict:
    return {
        'nodes': [_node(n) for n in scene.nodes],
        'arrows': [_arrow(a) for a in scene.arrows],
        'inlines': [_fragment(f) for f in scene.inlines],
    }


def dump_scene(scene: Scene) -> str:
    """Serialize one scene unit to its canonical JSON text."""
    return json.dumps(scene_to_dict(scene), indent=2, ensure_ascii=False) + '\n'
