"""Lowering from parsed statements to scene instances.

Each figure (``\\bfig`` ... ``\\efig``) becomes one :class:`~.model.Scene`;
inline arrows and inline loops between figures become standalone
single-fragment scenes.  Composite constructors expand to the same node
and arrow emissions as the equivalent sequence of plain morphisms, in
the exact order the drawing walks them, so scene files are stable golden
artifacts.

All coordinate arithmetic here is integer logical units.  Text fields
arrive verbatim from the parser and lose one level of braces at each
point of use (:func:`~.parser.strip_group`), matching how arguments are
re-braced when handed down a macro chain.
"""

from __future__ import annotations

from dataclasses import replace

from . import parser
from .arrows import parse_arrow_spec, resolve_compass
from .errors import (
    DEGENERATE_ARROW,
    DEGENERATE_LOOP,
    DUPLICATE_NODE,
    MASK_OUT_OF_RANGE,
    MISPLACED_CONSTRUCTOR,
    UNBALANCED_FIGURE,
    UNKNOWN_NODE,
    DiagnosticError,
)
from .metrics import MetricsTable
from .model import (
    ORIGIN,
    ArrowInstance,
    ArrowStyle,
    InlineArrowPart,
    InlineFragment,
    LogicalPoint,
    NodeInstance,
    RenderConfig,
    Scene,
    dedupe_nodes,
)
from .parser import Statement, strip_group

__all__ = [
    'Lowerer',
    'lower_document',
    'resolve_label_side',
    'tex_div',
    'twoar_end',
    'LEFT', 'RIGHT', 'MID', 'NO_SIDE',
]

LEFT = 'left'
RIGHT = 'right'
MID = 'mid'
NO_SIDE = 'none'

# the label side table: '^' in the source means left of the arrow's
# direction of travel, '_' means right; which one a placement letter
# picks depends on the sign of the span
_RULE_LETTERS = frozenset('lrabm')


def resolve_label_side(rule: str, dx: int, dy: int) -> str:
    """Side of the (dx, dy) direction a label placement resolves to."""
    if rule == 'l':
        return LEFT if dy > 0 else RIGHT
    if rule == 'r':
        return LEFT if dy < 0 else RIGHT
    if rule == 'a':
        return LEFT if dx > 0 else RIGHT
    if rule == 'b':
        return LEFT if dx < 0 else RIGHT
    if rule == 'm':
        return MID
    return NO_SIDE


def tex_div(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def twoar_end(dx: int, dy: int) -> LogicalPoint:
    """Endpoint of the free-direction double arrow, before unit scaling.

    The length correction runs in two truncated integer divisions whose
    order matters; keep the sequence exactly as is.
    """
    s = 3 * (dx * dx + dy * dy)
    a, b = abs(dx), abs(dy)
    d = 3 * a + b if a > b else a + 3 * b
    sx, sy = 500 * dx, 500 * dy
    x = tex_div(3 * sx, d) + tex_div(sx * d, s)
    y = tex_div(3 * sy, d) + tex_div(sy * d, s)
    return LogicalPoint(x, y)


_OMIT = ArrowStyle(shaft='invisible', head='none')


class _FigureBuilder:
    def __init__(self) -> None:
        self.nodes: list[NodeInstance] = []
        self.arrows: list[ArrowInstance] = []

    def node(self, pos: LogicalPoint, text: str, anchor: str = 'center',
             phantom: bool = False) -> None:
        self.nodes.append(NodeInstance(pos, text, anchor, phantom))

    def arrow(self, instance: ArrowInstance) -> None:
        self.arrows.append(instance)

    def scene(self) -> Scene:
        return dedupe_nodes(
            Scene(tuple(self.nodes), tuple(self.arrows), ()))


class Lowerer:
    """Statement-to-scene translator with a document-wide node registry."""

    def __init__(self, metrics: MetricsTable | None = None,
                 config: RenderConfig | None = None):
        self.metrics = metrics if metrics is not None else MetricsTable.builtin()
        self.config = config if config is not None else RenderConfig()
        self.registry: dict[str, tuple[LogicalPoint, str]] = {}
        self._figure: _FigureBuilder | None = None
        self._figure_loc = None

    def lower_document(self, statements: list[Statement]) -> list[Scene]:
        units: list[Scene] = []
        self._figure = None
        self._figure_loc = None
        for stmt in statements:
            try:
                self._statement(units, stmt)
            except DiagnosticError as err:
                raise err.with_context(
                    stmt.loc, parser.surface_keyword(stmt)) from None
        if self._figure is not None:
            raise DiagnosticError(
                UNBALANCED_FIGURE, 'a figure is opened but never closed',
                self._figure_loc, 'bfig')
        return units

    def _statement(self, units: list[Scene], stmt: Statement) -> None:
        c = stmt.constructor
        if c == parser.BEGIN_FIG:
            if self._figure is not None:
                raise DiagnosticError(
                    UNBALANCED_FIGURE, 'figures do not nest', stmt.loc)
            self._figure = _FigureBuilder()
            self._figure_loc = stmt.loc
            return
        if c == parser.END_FIG:
            if self._figure is None:
                raise DiagnosticError(
                    UNBALANCED_FIGURE,
                    "'\\efig' without a matching '\\bfig'", stmt.loc)
            units.append(self._figure.scene())
            self._figure = None
            return
        if c in (parser.INLINE_ARROW, parser.INLINE_LOOP):
            if self._figure is not None:
                raise DiagnosticError(
                    MISPLACED_CONSTRUCTOR,
                    'inline arrows live in running text, not inside a '
                    'figure', stmt.loc)
            if c == parser.INLINE_ARROW:
                units.append(Scene((), (), (self._inline_fragment(stmt),)))
            else:
                fig = _FigureBuilder()
                self._loop(fig, stmt)
                units.append(fig.scene())
            return
        if self._figure is None:
            raise DiagnosticError(
                MISPLACED_CONSTRUCTOR,
                "'\\%s' must appear between '\\bfig' and '\\efig'"
                % parser.surface_keyword(stmt), stmt.loc)
        self._HANDLERS[c](self, self._figure, stmt)

    # ---- the single-arrow core ----------------------------------------

    def _emit(self, fig: _FigureBuilder, x: int, y: int, letter: str,
              spec: str, dx: int, dy: int, text_a: str, text_b: str,
              label: str, src_phantom: bool = False,
              dst_phantom: bool = False) -> None:
        """One morphism: two node objects and the arrow between them."""
        a = strip_group(text_a)
        b = strip_group(text_b)
        src = LogicalPoint(x, y)
        dst = LogicalPoint(x + dx, y + dy)
        fig.node(src, a, phantom=src_phantom)
        fig.node(dst, b, phantom=dst_phantom)
        style = parse_arrow_spec(strip_group(spec))
        rule = letter if letter in _RULE_LETTERS else 'none'
        text = strip_group(label)
        if rule == 'none' or (rule == 'm' and self.metrics.text_advance(text) == 0):
            rule, text = 'none', ''
        if style == _OMIT and not text:
            return
        if dx == 0 and dy == 0:
            raise DiagnosticError(DEGENERATE_ARROW, 'zero-length arrow')
        fig.arrow(ArrowInstance(src, dst, style, text, rule,
                                src_text=a, dst_text=b))

    # ---- plain constructors -------------------------------------------

    def _morphism(self, fig: _FigureBuilder, stmt: Statement) -> None:
        dx, dy = stmt.spans
        self._emit(fig, stmt.origin.x, stmt.origin.y, stmt.placements,
                   stmt.specs[0], dx, dy, stmt.nodes[0], stmt.nodes[1],
                   stmt.labels[0])

    def _vect(self, fig: _FigureBuilder, stmt: Statement) -> None:
        style = parse_arrow_spec(strip_group(stmt.specs[0]))
        if style == _OMIT:
            return
        dx, dy = stmt.spans
        if dx == 0 and dy == 0:
            raise DiagnosticError(DEGENERATE_ARROW, 'zero-length arrow')
        fig.arrow(ArrowInstance(stmt.origin, stmt.origin.shifted(dx, dy),
                                style))

    def _place(self, fig: _FigureBuilder, stmt: Statement) -> None:
        fig.node(stmt.origin, strip_group(stmt.nodes[0]), anchor=stmt.anchor)

    def _node(self, fig: _FigureBuilder, stmt: Statement) -> None:
        if stmt.name in self.registry:
            raise DiagnosticError(
                DUPLICATE_NODE,
                "node '%s' is already defined" % stmt.name)
        self.registry[stmt.name] = (stmt.origin, stmt.nodes[0])
        fig.node(stmt.origin, strip_group(stmt.nodes[0]))

    def _named_arrow(self, fig: _FigureBuilder, stmt: Statement) -> None:
        names = [strip_group(n) for n in stmt.nodes]
        for name in names:
            if name not in self.registry:
                raise DiagnosticError(
                    UNKNOWN_NODE, "node '%s' is not defined" % name)
        (src, src_text), (dst, dst_text) = (self.registry[n] for n in names)
        self._emit(fig, src.x, src.y, stmt.placements, stmt.specs[0],
                   dst.x - src.x, dst.y - src.y, src_text, dst_text,
                   stmt.labels[0], src_phantom=True, dst_phantom=True)

    def _loop(self, fig: _FigureBuilder, stmt: Statement) -> None:
        for direction in (stmt.loop_out, stmt.loop_in):
            resolve_compass(direction)
        if stmt.loop_out == stmt.loop_in:
            raise DiagnosticError(
                DEGENERATE_LOOP,
                "loop leaves and returns along '%s'" % stmt.loop_out)
        text = strip_group(stmt.nodes[0])
        fig.node(stmt.origin, text)
        fig.arrow(ArrowInstance(stmt.origin, stmt.origin, ArrowStyle(),
                                src_text=text, dst_text=text,
                                loop_out=stmt.loop_out,
                                loop_in=stmt.loop_in))

    # ---- squares and their composites ---------------------------------

    def _square(self, fig: _FigureBuilder, stmt: Statement) -> None:
        # corners: A top-left, B top-right, C bottom-left, D bottom-right;
        # drawn bottom, left, top, right
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy = stmt.spans
        p, s, l = stmt.placements, stmt.specs, stmt.labels
        a, b, c, d = stmt.nodes
        self._emit(fig, x, y, p[3], s[3], dx, 0, c, d, l[3])
        self._emit(fig, x, y + dy, p[1], s[1], 0, -dy, a, c, l[1])
        self._emit(fig, x, y + dy, p[0], s[0], dx, 0, a, b, l[0])
        self._emit(fig, x + dx, y + dy, p[2], s[2], 0, -dy, b, d, l[2])

    def _auto_square(self, fig: _FigureBuilder, stmt: Statement) -> None:
        n, l = stmt.nodes, stmt.labels
        width = max(
            self.metrics.morphism_width(
                strip_group(n[0]), strip_group(n[1]), strip_group(l[0]),
                self.config),
            self.metrics.morphism_width(
                strip_group(n[2]), strip_group(n[3]), strip_group(l[3]),
                self.config))
        self._square(fig, replace(stmt, spans=(width, stmt.spans[0])))

    def _sub_square(self, fig: _FigureBuilder, stmt: Statement,
                    origin: tuple[int, int], spans: tuple[int, int],
                    slots: tuple[int, int, int, int],
                    shared: tuple[int, ...] = ()) -> None:
        """One pane of a composite, wired to the parent's seven slots.

        ``slots`` picks the parent placement/spec/label index for each
        square slot; indexes listed in ``shared`` get an empty spec and
        label instead, omitting the edge the neighboring pane already
        drew.
        """
        pick = lambda seq, i, k: '' if k in shared else seq[i]
        self._square(fig, Statement(
            parser.SQUARE,
            origin=LogicalPoint(*origin),
            placements=''.join(stmt.placements[i] for i in slots),
            specs=tuple(pick(stmt.specs, i, k) for k, i in enumerate(slots)),
            spans=spans,
            nodes=stmt.nodes,
            labels=tuple(pick(stmt.labels, i, k) for k, i in enumerate(slots)),
            loc=stmt.loc))

    def _hsquares(self, fig: _FigureBuilder, stmt: Statement) -> None:
        x, y = stmt.origin.x, stmt.origin.y
        dx1, dx2, dy = stmt.spans
        n = stmt.nodes
        left = replace(stmt, nodes=(n[0], n[1], n[3], n[4]))
        right = replace(stmt, nodes=(n[1], n[2], n[4], n[5]))
        self._sub_square(fig, left, (x, y), (dx1, dy), (0, 2, 3, 5))
        self._sub_square(fig, right, (x + dx1, y), (dx2, dy), (1, 3, 4, 6),
                         shared=(1,))

    def _h_auto_squares(self, fig: _FigureBuilder, stmt: Statement) -> None:
        x, y = stmt.origin.x, stmt.origin.y
        dy = stmt.spans[0]
        n = [strip_group(t) for t in stmt.nodes]
        l = [strip_group(t) for t in stmt.labels]
        width = lambda i, j, k: self.metrics.morphism_width(
            n[i], n[j], l[k], self.config)
        left_w = max(width(0, 1, 0), width(3, 4, 5))
        right_w = max(width(1, 2, 1), width(4, 5, 6))
        left = replace(stmt, nodes=(stmt.nodes[0], stmt.nodes[1],
                                    stmt.nodes[3], stmt.nodes[4]))
        right = replace(stmt, nodes=(stmt.nodes[1], stmt.nodes[2],
                                     stmt.nodes[4], stmt.nodes[5]))
        self._sub_square(fig, left, (x, y), (left_w, dy), (0, 2, 3, 5))
        self._sub_square(fig, right, (x + left_w, y), (right_w, dy),
                         (1, 3, 4, 6), shared=(1,))

    def _vsquares(self, fig: _FigureBuilder, stmt: Statement) -> None:
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy_upper, dy_lower = stmt.spans
        n = stmt.nodes
        lower = replace(stmt, nodes=(n[2], n[3], n[4], n[5]))
        upper = replace(stmt, nodes=(n[0], n[1], n[2], n[3]))
        self._sub_square(fig, lower, (x, y), (dx, dy_lower), (3, 4, 5, 6),
                         shared=(0,))
        self._sub_square(fig, upper, (x, y + dy_lower), (dx, dy_upper),
                         (0, 1, 2, 3))

    def _v_auto_squares(self, fig: _FigureBuilder, stmt: Statement) -> None:
        # the upper pane's height comes from the first span: an oddity,
        # but a faithful one
        x, y = stmt.origin.x, stmt.origin.y
        height_upper, height_lower = stmt.spans
        n = [strip_group(t) for t in stmt.nodes]
        l = [strip_group(t) for t in stmt.labels]
        width = max(
            self.metrics.morphism_width(n[0], n[1], l[0], self.config),
            self.metrics.morphism_width(n[2], n[3], l[3], self.config),
            self.metrics.morphism_width(n[4], n[5], l[6], self.config))
        lower = replace(stmt, nodes=(stmt.nodes[2], stmt.nodes[3],
                                     stmt.nodes[4], stmt.nodes[5]))
        upper = replace(stmt, nodes=(stmt.nodes[0], stmt.nodes[1],
                                     stmt.nodes[2], stmt.nodes[3]))
        self._sub_square(fig, lower, (x, y), (width, height_lower),
                         (3, 4, 5, 6), shared=(0,))
        self._sub_square(fig, upper, (x, y + height_lower),
                         (width, height_upper), (0, 1, 2, 3))

    # ---- diamonds and triangles ---------------------------------------

    def _diamond(self, fig: _FigureBuilder, stmt: Statement) -> None:
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy = stmt.spans
        p, s, l = stmt.placements, stmt.specs, stmt.labels
        a, b, c, d = stmt.nodes
        self._emit(fig, x, y + dy, p[2], s[2], dx, -dy, b, d, l[2])
        self._emit(fig, x + 2 * dx, y + dy, p[3], s[3], -dx, -dy, c, d, l[3])
        self._emit(fig, x + dx, y + 2 * dy, p[0], s[0], -dx, -dy, a, b, l[0])
        self._emit(fig, x + dx, y + 2 * dy, p[1], s[1], dx, -dy, a, c, l[1])

    def _triangle(self, fig: _FigureBuilder, stmt: Statement) -> None:
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy = stmt.spans
        p, s, l = stmt.placements, stmt.specs, stmt.labels
        a, b, c = stmt.nodes
        emit = self._emit
        kind = stmt.kind
        if kind == 'p':
            emit(fig, x, y + dy, p[0], s[0], dx, 0, a, b, l[0])
            emit(fig, x, y + dy, p[1], s[1], 0, -dy, a, c, l[1])
            emit(fig, x + dx, y + dy, p[2], s[2], -dx, -dy, b, c, l[2])
        elif kind == 'q':
            emit(fig, x, y + dy, p[0], s[0], dx, 0, a, b, l[0])
            emit(fig, x, y + dy, p[1], s[1], dx, -dy, a, c, l[1])
            emit(fig, x + dx, y + dy, p[2], s[2], 0, -dy, b, c, l[2])
        elif kind == 'd':
            emit(fig, x, y, p[2], s[2], dx, 0, b, c, l[2])
            emit(fig, x + dx, y + dy, p[0], s[0], -dx, -dy, a, b, l[0])
            emit(fig, x + dx, y + dy, p[1], s[1], 0, -dy, a, c, l[1])
        elif kind == 'b':
            emit(fig, x, y, p[2], s[2], dx, 0, b, c, l[2])
            emit(fig, x, y + dy, p[0], s[0], 0, -dy, a, b, l[0])
            emit(fig, x, y + dy, p[1], s[1], dx, -dy, a, c, l[1])
        elif kind == 'A':
            emit(fig, x, y, p[2], s[2], 2 * dx, 0, b, c, l[2])
            emit(fig, x + dx, y + dy, p[0], s[0], -dx, -dy, a, b, l[0])
            emit(fig, x + dx, y + dy, p[1], s[1], dx, -dy, a, c, l[1])
        elif kind == 'V':
            emit(fig, x, y + dy, p[1], s[1], dx, -dy, a, c, l[1])
            emit(fig, x, y + dy, p[0], s[0], 2 * dx, 0, a, b, l[0])
            emit(fig, x + 2 * dx, y + dy, p[2], s[2], -dx, -dy, b, c, l[2])
        elif kind == 'C':
            emit(fig, x, y + dy, p[2], s[2], dx, -dy, b, c, l[2])
            emit(fig, x + dx, y + 2 * dy, p[0], s[0], -dx, -dy, a, b, l[0])
            emit(fig, x + dx, y + 2 * dy, p[1], s[1], 0, -2 * dy, a, c, l[1])
        else:
            # the D walk hands slot two to the A->B edge and slot one to
            # A->C, unlike its siblings
            emit(fig, x + dx, y + dy, p[2], s[2], -dx, -dy, b, c, l[2])
            emit(fig, x, y + 2 * dy, p[1], s[1], dx, -dy, a, b, l[1])
            emit(fig, x, y + 2 * dy, p[0], s[0], 0, -2 * dy, a, c, l[0])

    def _triangle_pair(self, fig: _FigureBuilder, stmt: Statement) -> None:
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy = stmt.spans
        p, s, l = stmt.placements, stmt.specs, stmt.labels
        a, b, c, d = stmt.nodes
        emit = self._emit
        kind = stmt.kind
        if kind == 'A':
            emit(fig, x, y, p[3], s[3], dx, 0, b, c, l[3])
            emit(fig, x + dx, y, p[4], s[4], dx, 0, c, d, l[4])
            emit(fig, x + dx, y + dy, p[0], s[0], -dx, -dy, a, b, l[0])
            emit(fig, x + dx, y + dy, p[1], s[1], 0, -dy, a, c, l[1])
            emit(fig, x + dx, y + dy, p[2], s[2], dx, -dy, a, d, l[2])
        elif kind == 'V':
            emit(fig, x, y + dy, p[0], s[0], dx, 0, a, b, l[0])
            emit(fig, x, y + dy, p[2], s[2], dx, -dy, a, d, l[2])
            emit(fig, x + dx, y + dy, p[1], s[1], dx, 0, b, c, l[1])
            emit(fig, x + dx, y + dy, p[3], s[3], 0, -dy, b, d, l[3])
            emit(fig, x + 2 * dx, y + dy, p[4], s[4], -dx, -dy, c, d, l[4])
        elif kind == 'C':
            emit(fig, x, y + dy, p[4], s[4], 0, -dy, c, d, l[4])
            emit(fig, x - dx, y + dy, p[2], s[2], dx, 0, b, c, l[2])
            emit(fig, x - dx, y + dy, p[3], s[3], dx, -dy, b, d, l[3])
            emit(fig, x, y + 2 * dy, p[0], s[0], -dx, -dy, a, b, l[0])
            emit(fig, x, y + 2 * dy, p[1], s[1], 0, -dy, a, c, l[1])
        else:
            emit(fig, x, y + dy, p[2], s[2], dx, 0, b, c, l[2])
            emit(fig, x, y + dy, p[3], s[3], 0, -dy, b, d, l[3])
            emit(fig, x, y + 2 * dy, p[0], s[0], 0, -dy, a, b, l[0])
            emit(fig, x, y + 2 * dy, p[1], s[1], dx, -dy, a, c, l[1])
            emit(fig, x + dx, y + dy, p[4], s[4], -dx, -dy, c, d, l[4])

    # ---- pullback and cube --------------------------------------------

    def _pullback(self, fig: _FigureBuilder, stmt: Statement) -> None:
        square = stmt.inner
        self._square(fig, square)
        x, y = square.origin.x, square.origin.y
        dx, dy = square.spans
        tri = stmt.trident
        w, h = tri.spans
        p, s, l = tri.placements, tri.specs, tri.labels
        apex = tri.nodes[0]
        ex, ey = x - w, y + dy + h
        self._emit(fig, ex, ey, p[0], s[0], dx + w, -h, apex,
                   square.nodes[1], l[0])
        self._emit(fig, ex, ey, p[1], s[1], w, -h, apex,
                   square.nodes[0], l[1])
        self._emit(fig, ex, ey, p[2], s[2], w, -(dy + h), apex,
                   square.nodes[2], l[2])

    def _cube(self, fig: _FigureBuilder, stmt: Statement) -> None:
        self._square(fig, replace(stmt, constructor=parser.SQUARE,
                                  inner=None, connector=None))
        inner = stmt.inner
        self._square(fig, inner)
        conn = stmt.connector
        corners = _square_corners(stmt)
        inner_corners = _square_corners(inner)
        # connectors run outer corner to inner corner: top-right first,
        # then top-left, bottom-left, bottom-right
        for slot in (1, 0, 2, 3):
            (ox, oy), otext = corners[slot]
            (ix, iy), itext = inner_corners[slot]
            self._emit(fig, ox, oy, conn.placements[slot], conn.specs[slot],
                       ix - ox, iy - oy, otext, itext, conn.labels[slot],
                       dst_phantom=True)

    # ---- grids ----------------------------------------------------------

    def _border(self, fig: _FigureBuilder, x: int, y: int, dx: int,
                dy: int, src_text: str, dst_text: str) -> None:
        """Forward border arrow between a grid node and a blank '0'."""
        self._emit(fig, x, y, 'a', '>', dx, dy, src_text, dst_text, '')

    def _border_in(self, fig: _FigureBuilder, x: int, y: int, dx: int,
                   dy: int, text: str) -> None:
        """Incoming border, drawn reversed in the walk.

        The walk writes ``[node`0]`` with a ``<-`` spec; the scene stores
        the normalized forward arrow out of the blank endpoint, keeping
        the node emission order of the walk.
        """
        src = LogicalPoint(x, y)
        blank = src.shifted(dx, dy)
        fig.node(src, strip_group(text))
        fig.node(blank, '0')
        fig.arrow(ArrowInstance(blank, src, ArrowStyle(), '', 'a',
                                src_text='0', dst_text=strip_group(text)))

    def _grid3x3(self, fig: _FigureBuilder, stmt: Statement) -> None:
        if not 0 <= stmt.mask < 4096:
            raise DiagnosticError(
                MASK_OUT_OF_RANGE,
                'grid mask %d does not fit in 12 bits' % stmt.mask)
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy = stmt.spans
        bx, by = stmt.border
        p, s, l = stmt.placements, stmt.specs, stmt.labels
        a, b, c, d, e, f, g, h, i = stmt.nodes
        bit = lambda k: stmt.mask >> k & 1
        emit = self._emit
        top, mid = y + 2 * dy, y + dy
        if bit(5):
            self._border_in(fig, x, mid, -bx, 0, d)
        emit(fig, x, mid, p[5], s[5], dx, 0, d, e, l[5])
        emit(fig, x + dx, mid, p[6], s[6], dx, 0, e, f, l[6])
        if bit(6):
            self._border(fig, x + 2 * dx, mid, bx, 0, f, '0')
        if bit(3):
            self._border_in(fig, x, top, -bx, 0, a)
        if bit(0):
            self._border_in(fig, x, top, 0, by, a)
        emit(fig, x, top, p[0], s[0], dx, 0, a, b, l[0])
        emit(fig, x, top, p[2], s[2], 0, -dy, a, d, l[2])
        emit(fig, x + dx, top, p[1], s[1], dx, 0, b, c, l[1])
        emit(fig, x + dx, top, p[3], s[3], 0, -dy, b, e, l[3])
        if bit(1):
            self._border_in(fig, x + dx, top, 0, by, b)
        emit(fig, x + 2 * dx, top, p[4], s[4], 0, -dy, c, f, l[4])
        if bit(2):
            self._border_in(fig, x + 2 * dx, top, 0, by, c)
        if bit(4):
            self._border(fig, x + 2 * dx, top, bx, 0, c, '0')
        if bit(7):
            self._border_in(fig, x, y, -bx, 0, g)
        if bit(9):
            self._border(fig, x, y, 0, -by, g, '0')
        emit(fig, x, y, p[10], s[10], dx, 0, g, h, l[10])
        emit(fig, x + dx, y, p[11], s[11], dx, 0, h, i, l[11])
        if bit(10):
            self._border(fig, x + dx, y, 0, -by, h, '0')
        if bit(8):
            self._border(fig, x + 2 * dx, y, bx, 0, i, '0')
        if bit(11):
            self._border(fig, x + 2 * dx, y, 0, -by, i, '0')
        emit(fig, x, mid, p[7], s[7], 0, -dy, d, g, l[7])
        emit(fig, x + dx, mid, p[8], s[8], 0, -dy, e, h, l[8])
        emit(fig, x + 2 * dx, mid, p[9], s[9], 0, -dy, f, i, l[9])

    def _grid3x2(self, fig: _FigureBuilder, stmt: Statement) -> None:
        if not 0 <= stmt.mask < 16:
            raise DiagnosticError(
                MASK_OUT_OF_RANGE,
                'grid mask %d does not fit in 4 bits' % stmt.mask)
        x, y = stmt.origin.x, stmt.origin.y
        dx, dy = stmt.spans
        bx = stmt.border[0]
        p, s, l = stmt.placements, stmt.specs, stmt.labels
        a, b, c, d, e, f = stmt.nodes
        bit = lambda k: stmt.mask >> k & 1
        emit = self._emit
        if bit(2):
            self._border(fig, x - bx, y, bx, 0, '0', d)
        emit(fig, x, y, p[5], s[5], dx, 0, d, e, l[5])
        emit(fig, x + dx, y, p[6], s[6], dx, 0, e, f, l[6])
        if bit(3):
            self._border(fig, x + 2 * dx, y, bx, 0, f, '0')
        if bit(0):
            self._border(fig, x - bx, y + dy, bx, 0, '0', a)
        emit(fig, x, y + dy, p[0], s[0], dx, 0, a, b, l[0])
        emit(fig, x, y + dy, p[2], s[2], 0, -dy, a, d, l[2])
        emit(fig, x + dx, y + dy, p[1], s[1], dx, 0, b, c, l[1])
        emit(fig, x + dx, y + dy, p[3], s[3], 0, -dy, b, e, l[3])
        emit(fig, x + 2 * dx, y + dy, p[4], s[4], 0, -dy, c, f, l[4])
        if bit(1):
            self._border(fig, x + 2 * dx, y + dy, bx, 0, c, '0')

    # ---- inline fragments -----------------------------------------------

    def _inline_fragment(self, stmt: Statement) -> InlineFragment:
        kind = stmt.kind
        if kind == 'twoar':
            dx, dy = stmt.spans
            if dx == 0 and dy == 0:
                raise DiagnosticError(
                    DEGENERATE_ARROW, 'the double arrow needs a direction')
            part = InlineArrowPart(parse_arrow_spec('=>'), '', '', '')
            return InlineFragment(kind, twoar_end(dx, dy), (part,),
                                  unit_scale=0.1)
        if kind in ('rlimto', 'llimto'):
            spec = '->' if kind == 'rlimto' else '<-'
            part = InlineArrowPart(parse_arrow_spec(spec), '', '', '')
            return InlineFragment(kind, LogicalPoint(100, 0), (part,),
                                  tip_scale=0.8, raise_pt=2.0)
        specs = tuple(strip_group(s) for s in stmt.specs)
        sup, sub, mid = stmt.sup, stmt.sub, stmt.mid
        metrics, cfg = self.metrics, self.config
        if kind == 'two':
            length = stmt.length or metrics.inline_length(sup, sub, 200, cfg)
            parts = (
                InlineArrowPart(
                    replace(parse_arrow_spec(specs[0]), parallel_offset_pt=2.5),
                    sup, '', ''),
                InlineArrowPart(
                    replace(parse_arrow_spec(specs[1]), parallel_offset_pt=-2.5),
                    '', sub, ''),
            )
        elif kind == 'three':
            length = stmt.length or max(
                metrics.inline_length(sup, sub, 300, cfg),
                metrics.inline_length(mid, '', 300, cfg))
            if metrics.text_advance(mid) == 0:
                mid = ''
            parts = (
                InlineArrowPart(parse_arrow_spec(specs[1]), '', '', mid),
                InlineArrowPart(
                    replace(parse_arrow_spec(specs[0]), parallel_offset_pt=4.5),
                    sup, '', ''),
                InlineArrowPart(
                    replace(parse_arrow_spec(specs[2]), parallel_offset_pt=-4.5),
                    '', sub, ''),
            )
        else:
            length = stmt.length or metrics.inline_length(sup, sub, 100, cfg)
            parts = (InlineArrowPart(parse_arrow_spec(specs[0]), sup, sub, ''),)
        return InlineFragment(kind, LogicalPoint(length, 0), parts)

    _HANDLERS = {
        parser.MORPHISM: _morphism,
        parser.VECT: _vect,
        parser.SQUARE: _square,
        parser.AUTO_SQUARE: _auto_square,
        parser.DIAMOND: _diamond,
        parser.TRIANGLE: _triangle,
        parser.TRIANGLE_PAIR: _triangle_pair,
        parser.PULLBACK: _pullback,
        parser.H_SQUARES: _hsquares,
        parser.H_AUTO_SQUARES: _h_auto_squares,
        parser.V_SQUARES: _vsquares,
        parser.V_AUTO_SQUARES: _v_auto_squares,
        parser.CUBE: _cube,
        parser.GRID_3X3: _grid3x3,
        parser.GRID_3X2: _grid3x2,
        parser.PLACE: _place,
        parser.NODE: _node,
        parser.NAMED_ARROW: _named_arrow,
        parser.LOOP: _loop,
    }


def _square_corners(stmt: Statement) -> list[tuple[tuple[int, int], str]]:
    """Corner positions and texts in slot order TL, TR, BL, BR."""
    x, y = stmt.origin.x, stmt.origin.y
    dx, dy = stmt.spans
    a, b, c, d = stmt.nodes
    return [((x, y + dy), a), ((x + dx, y + dy), b), ((x, y), c),
            ((x + dx, y), d)]


def lower_document(statements: list[Statement],
                   metrics: MetricsTable | None = None,
                   config: RenderConfig | None = None) -> list[Scene]:
    """Lower a parsed document to a list of scene units."""
    return Lowerer(metrics, config).lower_document(statements)
