"""Core scene model: logical-unit geometry, render configuration, scene instances."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Tuple

# One logical unit is 0.01 em.  All constructor arithmetic stays in integer
# logical units; conversion to points happens only at render time.
UNIT_EM = 0.01
DEFAULT_SPAN = 500
DEFAULT_MARGIN = 150

ANCHORS = ("center", "l", "r", "u", "d", "lu", "ld", "ru", "rd")


@dataclass(frozen=True)
class LogicalPoint:
    x: int
    y: int

    def __add__(self, other: "LogicalPoint") -> "LogicalPoint":
        return LogicalPoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "LogicalPoint") -> "LogicalPoint":
        return LogicalPoint(self.x - other.x, self.y - other.y)

    def shifted(self, dx: int, dy: int) -> "LogicalPoint":
        return LogicalPoint(self.x + dx, self.y + dy)


ORIGIN = LogicalPoint(0, 0)


@dataclass(frozen=True)
class RenderConfig:
    """Physical rendering knobs; geometry in logical units never depends on these."""

    em_pt: float = 10.0
    object_margin_pt: float = 3.0
    axis_pt: Optional[float] = None  # None means 0.25 * em_pt
    loop_reach_em: float = 2.0
    label_scale: float = 1.0
    label_gap_pt: float = 2.0

    def __post_init__(self) -> None:
        if self.em_pt <= 0:
            raise ValueError("em_pt must be positive")
        if self.object_margin_pt < 0:
            raise ValueError("object_margin_pt must be non-negative")
        if self.axis_pt is not None and self.axis_pt < 0:
            raise ValueError("axis_pt must be non-negative")
        if self.label_scale <= 0:
            raise ValueError("label_scale must be positive")

    @property
    def axis(self) -> float:
        return 0.25 * self.em_pt if self.axis_pt is None else self.axis_pt


def to_physical(p: LogicalPoint, cfg: RenderConfig) -> Tuple[float, float]:
    """Logical units to points; exact IEEE double arithmetic, no rounding."""
    return (p.x * UNIT_EM * cfg.em_pt, p.y * UNIT_EM * cfg.em_pt)


@dataclass(frozen=True)
class ArrowStyle:
    tail: str = "none"        # none | mono | hook_up | hook_down | bar
    shaft: str = "solid"      # solid | dashed | dotted | double | invisible
    head: str = "normal"      # none | normal | double_head
    mid: str = "none"         # none | tick | cross
    parallel_offset_pt: float = 0.0
    reversed: bool = False

    def reverse(self) -> "ArrowStyle":
        return replace(self, reversed=not self.reversed)


@dataclass(frozen=True)
class NodeInstance:
    pos: LogicalPoint
    text: str
    anchor: str = "center"
    phantom: bool = False

    def key(self) -> Tuple[LogicalPoint, str, str]:
        return (self.pos, self.text, self.anchor)


@dataclass(frozen=True)
class ArrowInstance:
    src: LogicalPoint
    dst: LogicalPoint
    style: ArrowStyle
    label: str = ""
    label_rule: str = "none"  # l | m | r | a | b | none
    # Extent references: text of the node whose box clips this end, None for
    # bare vectors that join raw coordinates.
    src_text: Optional[str] = None
    dst_text: Optional[str] = None
    loop_out: Optional[str] = None
    loop_in: Optional[str] = None

    @property
    def is_loop(self) -> bool:
        return self.loop_out is not None

    def span(self) -> Tuple[int, int]:
        return (self.dst.x - self.src.x, self.dst.y - self.src.y)


@dataclass(frozen=True)
class InlineArrowPart:
    style: ArrowStyle
    sup: str = ""
    sub: str = ""
    mid: str = ""


@dataclass(frozen=True)
class InlineFragment:
    """A standalone arrow fragment rendered outside any figure."""

    kind: str
    end: LogicalPoint
    parts: Tuple[InlineArrowPart, ...]
    unit_scale: float = 1.0   # twoar renders at 0.001 em per unit
    tip_scale: float = 1.0
    raise_pt: float = 0.0


@dataclass(frozen=True)
class Scene:
    nodes: Tuple[NodeInstance, ...] = ()
    arrows: Tuple[ArrowInstance, ...] = ()
    inlines: Tuple[InlineFragment, ...] = ()


def dedupe_nodes(scene: Scene) -> Scene:
    """Collapse repeated (pos, text, anchor) nodes; a non-phantom wins over a phantom twin."""
    kept: list[NodeInstance] = []
    index: dict[Tuple[LogicalPoint, str, str], int] = {}
    for node in scene.nodes:
        k = node.key()
        if k not in index:
            index[k] = len(kept)
            kept.append(node)
        elif kept[index[k]].phantom and not node.phantom:
            kept[index[k]] = node
    return replace(scene, nodes=tuple(kept))


def translate(scene: Scene, dx: int, dy: int) -> Scene:
    """Shift every coordinate; used to state translation equivariance."""
    return Scene(
        nodes=tuple(replace(n, pos=n.pos.shifted(dx, dy)) for n in scene.nodes),
        arrows=tuple(
            replace(a, src=a.src.shifted(dx, dy), dst=a.dst.shifted(dx, dy))
            for a in scene.arrows
        ),
        inlines=scene.inlines,
    )
