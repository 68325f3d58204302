"""Reader for the diagram constructor language.

The surface syntax is a family of backslash keywords, each followed by a
fixed sequence of argument groups.  Most groups are optional and have
documented defaults:

    \\square(0,0)|alrb|/>`>`>`>/<500,500>[A`B`C`D;f`g`h`k]

A group is delimited by the characters it is written in: ``(...)`` for
coordinates, ``|...|`` for label placements, ``/.../`` for arrow specs,
``<...>`` for spans, ``[...]`` for node and label text.  Inside a group,
braces nest and protect delimiter characters, a backslash makes the next
character literal, ``%`` starts a comment running to the end of the
line, and a line break reads as a single space.  Optional groups may be
omitted individually, but the ones that do appear must keep the order
above.

:func:`parse_document` turns source text into :class:`Statement` records
with every default filled in.  Field text is stored verbatim; one level
of braces is stripped by :func:`strip_group` at the point of use, which
is how the arguments behave when handed down a macro chain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import (
    ARITY_ERROR,
    PARSE_ERROR,
    UNBALANCED_GROUP,
    UNKNOWN_CONSTRUCTOR,
    DiagnosticError,
    SourceLoc,
)
from .model import ORIGIN, LogicalPoint

__all__ = [
    'Statement',
    'parse_document',
    'print_document',
    'print_statement',
    'strip_group',
    'split_fields',
    'MORPHISM', 'VECT', 'SQUARE', 'AUTO_SQUARE', 'DIAMOND',
    'TRIANGLE', 'TRIANGLE_PAIR', 'PULLBACK', 'TRIDENT',
    'H_SQUARES', 'H_AUTO_SQUARES', 'V_SQUARES', 'V_AUTO_SQUARES',
    'CUBE', 'CONNECTOR', 'GRID_3X3', 'GRID_3X2',
    'PLACE', 'NODE', 'NAMED_ARROW', 'LOOP', 'INLINE_LOOP', 'INLINE_ARROW',
    'BEGIN_FIG', 'END_FIG',
]


MORPHISM = 'Morphism'
VECT = 'Vect'
SQUARE = 'Square'
AUTO_SQUARE = 'AutoSquare'
DIAMOND = 'Diamond'
TRIANGLE = 'Triangle'
TRIANGLE_PAIR = 'TrianglePair'
PULLBACK = 'Pullback'
TRIDENT = 'Trident'
H_SQUARES = 'HSquares'
H_AUTO_SQUARES = 'HAutoSquares'
V_SQUARES = 'VSquares'
V_AUTO_SQUARES = 'VAutoSquares'
CUBE = 'Cube'
CONNECTOR = 'Connector'
GRID_3X3 = 'Grid3x3'
GRID_3X2 = 'Grid3x2'
PLACE = 'Place'
NODE = 'Node'
NAMED_ARROW = 'NamedArrow'
LOOP = 'Loop'
INLINE_LOOP = 'InlineLoop'
INLINE_ARROW = 'InlineArrow'
BEGIN_FIG = 'BeginFig'
END_FIG = 'EndFig'


@dataclass(frozen=True)
class Statement:
    """One parsed constructor with all defaults filled in.

    Text fields (specs, node text, labels, names) are verbatim source
    slices; coordinates and spans are integers in logical units.  Which
    fields are meaningful depends on ``constructor``; unused ones keep
    their empty defaults.  ``loc`` points at the keyword and is ignored
    by equality so printed-and-reparsed statements compare equal.
    """

    constructor: str
    kind: str = ''
    origin: LogicalPoint = ORIGIN
    placements: str = ''
    specs: tuple[str, ...] = ()
    spans: tuple[int, ...] = ()
    nodes: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()
    mask: int = 0
    border: tuple[int, ...] = ()
    inner: 'Statement | None' = None
    trident: 'Statement | None' = None
    connector: 'Statement | None' = None
    name: str = ''
    anchor: str = 'center'
    loop_out: str = ''
    loop_in: str = ''
    length: int = 0
    sup: str = ''
    sub: str = ''
    mid: str = ''
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)


def strip_group(text: str) -> str:
    """Remove one level of braces iff the text is exactly one group."""
    if len(text) < 2 or text[0] != '{' or text[-1] != '}':
        return text
    depth = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == '\\':
            i += 2
            continue
        if ch == '{':
            depth += 1
        elif ch == '}':
            depth -= 1
            if depth == 0:
                return text[1:-1] if i == len(text) - 1 else text
        i += 1
    return text


def split_fields(text: str, sep: str) -> list[str]:
    """Split on ``sep`` at brace depth zero, honoring backslash escapes."""
    fields: list[str] = []
    current: list[str] = []
    depth = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == '\\' and i + 1 < len(text):
            current.append(text[i:i + 2])
            i += 2
            continue
        if ch == '{':
            depth += 1
        elif ch == '}':
            depth -= 1
        elif ch == sep and depth == 0:
            fields.append(''.join(current))
            current = []
            i += 1
            continue
        current.append(ch)
        i += 1
    fields.append(''.join(current))
    return fields


def _split_payload(text: str) -> tuple[str, str] | None:
    """Split at the first depth-zero ';', or None if there is none."""
    depth = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == '\\':
            i += 2
            continue
        if ch == '{':
            depth += 1
        elif ch == '}':
            depth -= 1
        elif ch == ';' and depth == 0:
            return text[:i], text[i + 1:]
        i += 1
    return None


_INT_RE = re.compile(r'[+-]?[0-9]+\Z')


class _Scanner:
    """Character cursor with line/column tracking and group scanning."""

    def __init__(self, text: str, filename: str):
        self.text = text.replace('\r\n', '\n').replace('\r', '\n')
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> SourceLoc:
        return SourceLoc(self.filename, self.line, self.col)

    @property
    def more(self) -> bool:
        return self.pos < len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.more else ''

    def take(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == '\n':
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_blank(self) -> None:
        while self.more:
            ch = self.peek()
            if ch in ' \t\n':
                self.take()
            elif ch == '%':
                self._skip_comment()
            else:
                break

    def _skip_comment(self) -> None:
        # comment owns the rest of the line, the break, and the indent
        while self.more and self.peek() != '\n':
            self.take()
        if self.more:
            self.take()
        while self.more and self.peek() in ' \t':
            self.take()

    def scan_group(self, closer: str, what: str, opened_at: SourceLoc) -> str:
        parts: list[str] = []
        depth = 0
        while self.more:
            ch = self.peek()
            if depth == 0 and ch == closer:
                self.take()
                return ''.join(parts)
            if ch == '\\':
                parts.append(self.take())
                if self.more:
                    parts.append(self.take())
                continue
            if ch == '%':
                self._skip_comment()
                continue
            if ch == '\n':
                self.take()
                while self.more and self.peek() in ' \t':
                    self.take()
                parts.append(' ')
                continue
            if ch == '{':
                depth += 1
            elif ch == '}':
                if depth == 0:
                    raise DiagnosticError(
                        UNBALANCED_GROUP,
                        "unexpected '}' inside %s" % what, self.loc())
                depth -= 1
            parts.append(self.take())
        raise DiagnosticError(
            UNBALANCED_GROUP,
            "missing '%s' closing the %s" % (closer, what), opened_at)

    def opt_group(self, opener: str, closer: str, what: str) -> str | None:
        self.skip_blank()
        if self.peek() != opener:
            return None
        opened_at = self.loc()
        self.take()
        return self.scan_group(closer, what, opened_at)

    def need_group(self, opener: str, closer: str, what: str) -> str:
        self.skip_blank()
        if self.peek() != opener:
            raise DiagnosticError(
                PARSE_ERROR,
                "expected '%s' opening the %s" % (opener, what), self.loc())
        opened_at = self.loc()
        self.take()
        return self.scan_group(closer, what, opened_at)

    def take_token(self, what: str) -> str:
        """One undelimited argument: a group, a control word, or a char."""
        self.skip_blank()
        if not self.more:
            raise DiagnosticError(
                PARSE_ERROR, 'expected %s, found end of input' % what,
                self.loc())
        ch = self.peek()
        if ch == '{':
            opened_at = self.loc()
            self.take()
            return self.scan_group('}', what, opened_at)
        if ch == '}':
            raise DiagnosticError(
                PARSE_ERROR, "expected %s, found '}'" % what, self.loc())
        if ch == '\\':
            word = [self.take()]
            if not self.more:
                raise DiagnosticError(
                    PARSE_ERROR, 'expected %s after backslash' % what,
                    self.loc())
            word.append(self.take())
            if word[1].isalpha():
                while self.more and self.peek().isalpha():
                    word.append(self.take())
            return ''.join(word)
        return self.take()


@dataclass(frozen=True)
class _Shape:
    """Argument plan for the table-driven constructors."""

    constructor: str
    kind: str
    placements: str
    n_specs: int
    spans: tuple[int, ...]
    n_nodes: int
    n_labels: int


_SHAPES = {
    'morphism': _Shape(MORPHISM, '', 'a', 1, (500, 0), 2, 1),
    'square': _Shape(SQUARE, '', 'alrb', 4, (500, 500), 4, 4),
    'Square': _Shape(AUTO_SQUARE, '', 'alrb', 4, (500,), 4, 4),
    'Diamond': _Shape(DIAMOND, '', 'lrlr', 4, (400, 400), 4, 4),
    'ptriangle': _Shape(TRIANGLE, 'p', 'alr', 3, (500, 500), 3, 3),
    'qtriangle': _Shape(TRIANGLE, 'q', 'alr', 3, (500, 500), 3, 3),
    'dtriangle': _Shape(TRIANGLE, 'd', 'lrb', 3, (500, 500), 3, 3),
    'btriangle': _Shape(TRIANGLE, 'b', 'lrb', 3, (500, 500), 3, 3),
    'Atriangle': _Shape(TRIANGLE, 'A', 'lrb', 3, (500, 500), 3, 3),
    'Vtriangle': _Shape(TRIANGLE, 'V', 'alb', 3, (500, 500), 3, 3),
    'Ctriangle': _Shape(TRIANGLE, 'C', 'arb', 3, (500, 500), 3, 3),
    'Dtriangle': _Shape(TRIANGLE, 'D', 'lab', 3, (500, 500), 3, 3),
    'Atrianglepair': _Shape(TRIANGLE_PAIR, 'A', 'lmrbb', 5, (500, 500), 4, 5),
    'Vtrianglepair': _Shape(TRIANGLE_PAIR, 'V', 'aalmr', 5, (500, 500), 4, 5),
    'Ctrianglepair': _Shape(TRIANGLE_PAIR, 'C', 'lrmlr', 5, (500, 500), 4, 5),
    'Dtrianglepair': _Shape(TRIANGLE_PAIR, 'D', 'lrmlr', 5, (500, 500), 4, 5),
    'hsquares': _Shape(H_SQUARES, '', 'aalmrbb', 7, (500, 500, 500), 6, 7),
    'hSquares': _Shape(H_AUTO_SQUARES, '', 'aalmrbb', 7, (500,), 6, 7),
    'vsquares': _Shape(V_SQUARES, '', 'aalmrbb', 7, (500, 500, 500), 6, 7),
    'vSquares': _Shape(V_AUTO_SQUARES, '', 'alrmlrb', 7, (500, 500), 6, 7),
}

_TRIDENT_SHAPE = _Shape(TRIDENT, '', 'amb', 3, (500, 500), 1, 3)
_CUBE_OUTER = _Shape(CUBE, '', 'alrb', 4, (1500, 1500), 4, 4)
_CUBE_INNER = _Shape(SQUARE, '', 'alrb', 4, (500, 500), 4, 4)

_INLINE_SPECS = {'to': 1, 'two': 2, 'three': 3}
_INLINE_PRESETS = {
    'mon': (' >->',),
    'epi': ('->>',),
    'toleft': ('<-',),
    'monleft': ('<-< ',),
    'epileft': ('<<-',),
}

_GRID_BORDER_DEFAULT = {GRID_3X3: (400, 400), GRID_3X2: (400,)}
_ANCHOR_LETTERS = frozenset('lrud')


class _Parser:
    def __init__(self, text: str, filename: str):
        self.scan = _Scanner(text, filename)

    def parse(self) -> list[Statement]:
        statements = []
        while True:
            self.scan.skip_blank()
            if not self.scan.more:
                return statements
            statements.append(self._statement())

    def _statement(self) -> Statement:
        loc = self.scan.loc()
        if self.scan.peek() != '\\':
            raise DiagnosticError(
                PARSE_ERROR,
                'unexpected character %r; statements start with a '
                'backslash keyword' % self.scan.peek(), loc)
        self.scan.take()
        word = []
        while self.scan.more and self.scan.peek().isalpha():
            word.append(self.scan.take())
        keyword = ''.join(word)
        if not keyword:
            raise DiagnosticError(
                UNKNOWN_CONSTRUCTOR,
                "control symbol '\\%s' is not a constructor"
                % self.scan.peek(), loc)
        try:
            return self._dispatch(keyword, loc)
        except DiagnosticError as err:
            raise err.with_context(loc, keyword) from None

    def _dispatch(self, keyword: str, loc: SourceLoc) -> Statement:
        if keyword in _SHAPES:
            return self._shape(_SHAPES[keyword], loc)
        if keyword in _INLINE_SPECS or keyword in _INLINE_PRESETS:
            return self._inline(keyword, loc)
        method = {
            'vect': self._vect,
            'pullback': self._pullback,
            'cube': self._cube,
            'iiixiii': self._grid,
            'iiixii': self._grid,
            'place': self._place,
            'node': self._node,
            'arrow': self._arrow,
            'Loop': self._loop,
            'iloop': self._loop,
            'twoar': self._twoar,
            'rlimto': self._limit,
            'llimto': self._limit,
            'bfig': self._figure,
            'efig': self._figure,
        }.get(keyword)
        if method is None:
            raise DiagnosticError(
                UNKNOWN_CONSTRUCTOR,
                '\\%s is not a diagram constructor' % keyword, loc)
        return method(keyword, loc)

    # ---- shared argument groups -------------------------------------

    def _pair(self, what: str = 'coordinate pair') -> tuple[int, int]:
        loc = self.scan.loc()
        raw = self.scan.need_group('(', ')', what)
        parts = split_fields(raw, ',')
        if len(parts) != 2:
            raise DiagnosticError(
                ARITY_ERROR,
                '%s needs 2 components, got %d' % (what, len(parts)), loc)
        return self._int(parts[0], what), self._int(parts[1], what)

    def _opt_origin(self, default: tuple[int, int]) -> LogicalPoint:
        self.scan.skip_blank()
        if self.scan.peek() != '(':
            return LogicalPoint(*default)
        return LogicalPoint(*self._pair())

    def _opt_placements(self, default: str) -> str:
        raw = self.scan.opt_group('|', '|', 'placement list')
        if raw is None:
            return default
        letters = ''.join(raw.split())
        if len(letters) != len(default):
            raise DiagnosticError(
                ARITY_ERROR,
                'expected %d placement letters, got %d'
                % (len(default), len(letters)), self.scan.loc())
        return letters

    def _opt_specs(self, count: int, default: str = '>') -> tuple[str, ...]:
        raw = self.scan.opt_group('/', '/', 'spec list')
        if raw is None:
            return (default,) * count
        if count == 1:
            return (raw,)
        parts = split_fields(raw, '`')
        if len(parts) != count:
            raise DiagnosticError(
                ARITY_ERROR,
                'expected %d arrow specs, got %d' % (count, len(parts)),
                self.scan.loc())
        return tuple(parts)

    def _opt_spans(self, defaults: tuple[int, ...]) -> tuple[int, ...]:
        loc = self.scan.loc()
        raw = self.scan.opt_group('<', '>', 'span list')
        if raw is None:
            return defaults
        parts = split_fields(raw, ',')
        if len(parts) != len(defaults):
            raise DiagnosticError(
                ARITY_ERROR,
                'expected %d span entries, got %d'
                % (len(defaults), len(parts)), loc)
        return tuple(self._int(p, 'span') for p in parts)

    def _payload(self, n_nodes: int, n_labels: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
        loc = self.scan.loc()
        raw = self.scan.need_group('[', ']', 'node and label list')
        halves = _split_payload(raw)
        if halves is None:
            raise DiagnosticError(
                PARSE_ERROR,
                "expected ';' separating nodes from labels", loc)
        nodes = split_fields(halves[0], '`')
        labels = split_fields(halves[1], '`')
        if len(nodes) != n_nodes:
            raise DiagnosticError(
                ARITY_ERROR,
                'expected %d nodes, got %d' % (n_nodes, len(nodes)), loc)
        if len(labels) != n_labels:
            raise DiagnosticError(
                ARITY_ERROR,
                'expected %d labels, got %d' % (n_labels, len(labels)), loc)
        return tuple(nodes), tuple(labels)

    def _int(self, text: str, what: str) -> int:
        cleaned = strip_group(text).strip()
        if not _INT_RE.match(cleaned):
            raise DiagnosticError(
                PARSE_ERROR,
                '%s must be an integer, got %r' % (what, text.strip()),
                self.scan.loc())
        return int(cleaned)

    def _opt_prefixed(self, prefix: str, what: str) -> str:
        self.scan.skip_blank()
        if self.scan.peek() != prefix:
            return ''
        self.scan.take()
        return self.scan.take_token(what)

    # ---- constructors ------------------------------------------------

    def _shape(self, shape: _Shape, loc: SourceLoc) -> Statement:
        origin = self._opt_origin((0, 0))
        placements = self._opt_placements(shape.placements)
        specs = self._opt_specs(shape.n_specs)
        spans = self._opt_spans(shape.spans)
        nodes, labels = self._payload(shape.n_nodes, shape.n_labels)
        return Statement(
            shape.constructor, kind=shape.kind, origin=origin,
            placements=placements, specs=specs, spans=spans,
            nodes=nodes, labels=labels, loc=loc)

    def _vect(self, keyword: str, loc: SourceLoc) -> Statement:
        origin = LogicalPoint(*self._pair())
        spec = self.scan.need_group('/', '/', 'arrow spec')
        span_loc = self.scan.loc()
        raw = self.scan.need_group('<', '>', 'span pair')
        parts = split_fields(raw, ',')
        if len(parts) != 2:
            raise DiagnosticError(
                ARITY_ERROR,
                'expected 2 span entries, got %d' % len(parts), span_loc)
        spans = tuple(self._int(p, 'span') for p in parts)
        return Statement(VECT, origin=origin, specs=(spec,), spans=spans,
                         loc=loc)

    def _pullback(self, keyword: str, loc: SourceLoc) -> Statement:
        square = self._shape(_SHAPES['square'], loc)
        # the trident continues from the square's far corner and has no
        # origin group of its own
        trident = self._shape_tail(_TRIDENT_SHAPE, loc)
        return Statement(PULLBACK, inner=square, trident=trident, loc=loc)

    def _cube(self, keyword: str, loc: SourceLoc) -> Statement:
        outer = self._shape(_CUBE_OUTER, loc)
        inner_origin = self._opt_origin((500, 500))
        inner = replace(self._shape_tail(_CUBE_INNER, loc), origin=inner_origin)
        placements = self._opt_placements('mmmm')
        specs = self._opt_specs(4)
        labels_loc = self.scan.loc()
        raw = self.scan.need_group('[', ']', 'connector label list')
        labels = split_fields(raw, '`')
        if len(labels) != 4:
            raise DiagnosticError(
                ARITY_ERROR,
                'expected 4 connector labels, got %d' % len(labels),
                labels_loc)
        connector = Statement(CONNECTOR, placements=placements, specs=specs,
                              labels=tuple(labels), loc=loc)
        return replace(outer, inner=inner, connector=connector)

    def _shape_tail(self, shape: _Shape, loc: SourceLoc) -> Statement:
        """A shape's groups after the origin (already consumed)."""
        placements = self._opt_placements(shape.placements)
        specs = self._opt_specs(shape.n_specs)
        spans = self._opt_spans(shape.spans)
        nodes, labels = self._payload(shape.n_nodes, shape.n_labels)
        return Statement(
            shape.constructor, kind=shape.kind, placements=placements,
            specs=specs, spans=spans, nodes=nodes, labels=labels, loc=loc)

    def _grid(self, keyword: str, loc: SourceLoc) -> Statement:
        three = keyword == 'iiixiii'
        constructor = GRID_3X3 if three else GRID_3X2
        origin = self._opt_origin((0, 0))
        placements = self._opt_placements('aalmrmmlmrbb' if three else 'aalmrbb')
        specs = self._opt_specs(12 if three else 7)
        spans = self._opt_spans((500, 500))
        mask, border = self._mask(constructor)
        nodes, labels = self._payload(9 if three else 6, 12 if three else 7)
        return Statement(
            constructor, origin=origin, placements=placements, specs=specs,
            spans=spans, mask=mask, border=border, nodes=nodes,
            labels=labels, loc=loc)

    def _mask(self, constructor: str) -> tuple[int, tuple[int, ...]]:
        default_border = _GRID_BORDER_DEFAULT[constructor]
        self.scan.skip_blank()
        ch = self.scan.peek()
        if ch == '[' or not ch:
            return 0, default_border
        loc = self.scan.loc()
        if ch == '{':
            self.scan.take()
            digits = ''.join(self.scan.scan_group('}', 'grid mask', loc).split())
        elif ch.isdigit():
            run = []
            while self.scan.more and self.scan.peek().isdigit():
                run.append(self.scan.take())
            digits = ''.join(run)
        else:
            raise DiagnosticError(
                PARSE_ERROR,
                "expected a grid mask or '[' before %r" % ch, loc)
        if not digits.isdigit():
            raise DiagnosticError(
                PARSE_ERROR, 'grid mask must be a decimal number', loc)
        border = self._opt_spans(default_border)
        return int(digits), border

    def _place(self, keyword: str, loc: SourceLoc) -> Statement:
        anchor_raw = self.scan.opt_group('[', ']', 'anchor')
        anchor = 'center' if anchor_raw is None else self._anchor(anchor_raw)
        origin = LogicalPoint(*self._pair())
        text = self.scan.need_group('[', ']', 'node text')
        return Statement(PLACE, origin=origin, nodes=(text,), anchor=anchor,
                         loc=loc)

    def _anchor(self, raw: str) -> str:
        letters = ''.join(raw.split())
        if letters == '':
            return 'center'
        if (len(letters) <= 2 and set(letters) <= _ANCHOR_LETTERS
                and len(set(letters) & {'l', 'r'}) <= 1
                and len(set(letters) & {'u', 'd'}) <= 1
                and len(set(letters)) == len(letters)):
            # canonical order puts the horizontal letter first
            horizontal = ''.join(c for c in letters if c in 'lr')
            vertical = ''.join(c for c in letters if c in 'ud')
            return horizontal + vertical
        raise DiagnosticError(
            PARSE_ERROR, 'bad anchor %r' % raw, self.scan.loc())

    def _node(self, keyword: str, loc: SourceLoc) -> Statement:
        name = self.scan.take_token('node name')
        origin = LogicalPoint(*self._pair())
        text = self.scan.need_group('[', ']', 'node text')
        return Statement(NODE, name=name, origin=origin, nodes=(text,),
                         loc=loc)

    def _arrow(self, keyword: str, loc: SourceLoc) -> Statement:
        placements = self._opt_placements('a')
        specs = self._opt_specs(1)
        nodes, labels = self._payload(2, 1)
        return Statement(NAMED_ARROW, placements=placements, specs=specs,
                         nodes=nodes, labels=labels, loc=loc)

    def _loop(self, keyword: str, loc: SourceLoc) -> Statement:
        if keyword == 'Loop':
            origin = LogicalPoint(*self._pair())
            constructor = LOOP
        else:
            origin = ORIGIN
            constructor = INLINE_LOOP
        text = self.scan.take_token('loop text')
        out_dir, in_dir = self._directions()
        return Statement(constructor, origin=origin, nodes=(text,),
                         loop_out=out_dir, loop_in=in_dir, loc=loc)

    def _directions(self) -> tuple[str, str]:
        loc = self.scan.loc()
        raw = self.scan.need_group('(', ')', 'direction pair')
        parts = split_fields(raw, ',')
        if len(parts) != 2:
            raise DiagnosticError(
                ARITY_ERROR,
                'direction pair needs 2 components, got %d' % len(parts),
                loc)
        return parts[0].strip(), parts[1].strip()

    def _inline(self, keyword: str, loc: SourceLoc) -> Statement:
        if keyword in _INLINE_PRESETS:
            specs = _INLINE_PRESETS[keyword]
        else:
            specs = self._opt_specs(_INLINE_SPECS[keyword])
        length = self._opt_spans((0,))[0]
        sup = self._opt_prefixed('^', 'superscript label')
        mid = self._opt_prefixed('|', 'middle label') if keyword == 'three' else ''
        sub = self._opt_prefixed('_', 'subscript label')
        return Statement(INLINE_ARROW, kind=keyword, specs=specs,
                         length=length, sup=sup, mid=mid, sub=sub, loc=loc)

    def _twoar(self, keyword: str, loc: SourceLoc) -> Statement:
        spans = self._pair('direction pair')
        return Statement(INLINE_ARROW, kind=keyword, spans=spans, loc=loc)

    def _limit(self, keyword: str, loc: SourceLoc) -> Statement:
        return Statement(INLINE_ARROW, kind=keyword, loc=loc)

    def _figure(self, keyword: str, loc: SourceLoc) -> Statement:
        return Statement(BEGIN_FIG if keyword == 'bfig' else END_FIG, loc=loc)


def parse_document(text: str, filename: str = '<input>') -> list[Statement]:
    """Parse source text into a list of statements."""
    return _Parser(text, filename).parse()


# ---- canonical printing ---------------------------------------------

_SHAPE_KEYWORD = {(s.constructor, s.kind): kw for kw, s in _SHAPES.items()}


def _fmt_pair(point: LogicalPoint) -> str:
    return '(%d,%d)' % (point.x, point.y)


def _fmt_spans(spans: tuple[int, ...]) -> str:
    return '<%s>' % ','.join(str(v) for v in spans)


def _fmt_specs(specs: tuple[str, ...]) -> str:
    return '/%s/' % '`'.join(specs)


def _fmt_payload(nodes: tuple[str, ...], labels: tuple[str, ...]) -> str:
    return '[%s;%s]' % ('`'.join(nodes), '`'.join(labels))


def _shape_args(stmt: Statement) -> str:
    return (_fmt_pair(stmt.origin) + '|%s|' % stmt.placements
            + _fmt_specs(stmt.specs) + _fmt_spans(stmt.spans)
            + _fmt_payload(stmt.nodes, stmt.labels))


def print_statement(stmt: Statement) -> str:
    """Render a statement back to canonical source.

    Every optional group is written out explicitly, so parsing the
    result yields a statement equal to the input.
    """
    c = stmt.constructor
    if c == BEGIN_FIG:
        return '\\bfig'
    if c == END_FIG:
        return '\\efig'
    if c == VECT:
        return '\\vect%s/%s/%s' % (
            _fmt_pair(stmt.origin), stmt.specs[0], _fmt_spans(stmt.spans))
    if c == PULLBACK:
        trident = stmt.trident
        return '\\pullback%s |%s|%s%s%s' % (
            _shape_args(stmt.inner), trident.placements,
            _fmt_specs(trident.specs), _fmt_spans(trident.spans),
            _fmt_payload(trident.nodes, trident.labels))
    if c == CUBE:
        connector = stmt.connector
        return '\\cube%s %s |%s|%s[%s]' % (
            _shape_args(stmt), _shape_args(stmt.inner),
            connector.placements, _fmt_specs(connector.specs),
            '`'.join(connector.labels))
    if c in (GRID_3X3, GRID_3X2):
        keyword = 'iiixiii' if c == GRID_3X3 else 'iiixii'
        return '\\%s%s|%s|%s%s{%d}%s%s' % (
            keyword, _fmt_pair(stmt.origin), stmt.placements,
            _fmt_specs(stmt.specs), _fmt_spans(stmt.spans), stmt.mask,
            _fmt_spans(stmt.border), _fmt_payload(stmt.nodes, stmt.labels))
    if c == PLACE:
        anchor = '' if stmt.anchor == 'center' else '[%s]' % stmt.anchor
        return '\\place%s%s[%s]' % (anchor, _fmt_pair(stmt.origin),
                                    stmt.nodes[0])
    if c == NODE:
        return '\\node{%s}%s[%s]' % (stmt.name, _fmt_pair(stmt.origin),
                                     stmt.nodes[0])
    if c == NAMED_ARROW:
        return '\\arrow|%s|/%s/%s' % (
            stmt.placements, stmt.specs[0],
            _fmt_payload(stmt.nodes, stmt.labels))
    if c == LOOP:
        return '\\Loop%s{%s}(%s,%s)' % (
            _fmt_pair(stmt.origin), stmt.nodes[0], stmt.loop_out,
            stmt.loop_in)
    if c == INLINE_LOOP:
        return '\\iloop{%s}(%s,%s)' % (stmt.nodes[0], stmt.loop_out,
                                       stmt.loop_in)
    if c == INLINE_ARROW:
        return _print_inline(stmt)
    keyword = _SHAPE_KEYWORD[(c, stmt.kind)]
    return '\\%s%s' % (keyword, _shape_args(stmt))


def _print_inline(stmt: Statement) -> str:
    kind = stmt.kind
    if kind == 'twoar':
        return '\\twoar(%d,%d)' % stmt.spans
    if kind in ('rlimto', 'llimto'):
        return '\\' + kind
    parts = ['\\', kind]
    if kind in _INLINE_SPECS:
        parts.append(_fmt_specs(stmt.specs))
    parts.append('<%d>' % stmt.length)
    parts.append('^{%s}' % stmt.sup)
    if kind == 'three':
        parts.append('|{%s}' % stmt.mid)
    parts.append('_{%s}' % stmt.sub)
    return ''.join(parts)


def print_document(statements: list[Statement]) -> str:
    """Canonical one-statement-per-line rendering."""
    return '\n'.join(print_statement(s) for s in statements) + '\n'


_FIXED_KEYWORD = {
    VECT: 'vect', PULLBACK: 'pullback', CUBE: 'cube',
    GRID_3X3: 'iiixiii', GRID_3X2: 'iiixii', PLACE: 'place',
    NODE: 'node', NAMED_ARROW: 'arrow', LOOP: 'Loop',
    INLINE_LOOP: 'iloop', BEGIN_FIG: 'bfig', END_FIG: 'efig',
    TRIDENT: 'pullback', CONNECTOR: 'cube',
}


def surface_keyword(stmt: Statement) -> str:
    """The keyword a statement was written with, for diagnostics."""
    if stmt.constructor == INLINE_ARROW:
        return stmt.kind
    fixed = _FIXED_KEYWORD.get(stmt.constructor)
    if fixed is not None:
        return fixed
    return _SHAPE_KEYWORD[(stmt.constructor, stmt.kind)]
