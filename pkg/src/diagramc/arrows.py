"""Arrow spec strings to canonical styles, plus compass direction resolution."""
from __future__ import annotations

import math
import re
from dataclasses import replace

from .errors import BAD_DIRECTION, UNSUPPORTED_ARROW_SPEC, DiagnosticError
from .model import ArrowStyle

_DIAG = math.sqrt(2.0) / 2.0

COMPASS = {
    "l": (-1.0, 0.0),
    "r": (1.0, 0.0),
    "u": (0.0, 1.0),
    "d": (0.0, -1.0),
    "ul": (-_DIAG, _DIAG),
    "ur": (_DIAG, _DIAG),
    "dl": (-_DIAG, -_DIAG),
    "dr": (_DIAG, -_DIAG),
}


def resolve_compass(d: str) -> tuple[float, float]:
    try:
        return COMPASS[d]
    except KeyError:
        raise DiagnosticError(BAD_DIRECTION, f"unknown compass direction {d!r}") from None


# Directional names as they appear between slashes.  Leading/trailing spaces
# are significant: the blank-tip names ship with them.
_FORWARD = {
    "": ("none", "invisible", "none"),
    "-": ("none", "solid", "none"),
    ">": ("none", "solid", "normal"),
    "->": ("none", "solid", "normal"),
    "->>": ("none", "solid", "double_head"),
    " >->": ("mono", "solid", "normal"),
    " (->": ("hook_up", "solid", "normal"),
    "^{ (}->": ("hook_up", "solid", "normal"),
    "_{ (}->": ("hook_down", "solid", "normal"),
    "|->": ("bar", "solid", "normal"),
    "--": ("none", "dashed", "none"),
    "-->": ("none", "dashed", "normal"),
    ".": ("none", "dotted", "none"),
    "..": ("none", "dotted", "none"),
    "d": ("none", "dotted", "none"),
    "..>": ("none", "dotted", "normal"),
    "=": ("none", "double", "none"),
    "=>": ("none", "double", "normal"),
}

_REVERSED = {
    "<-": ("none", "solid", "normal"),
    "<<-": ("none", "solid", "double_head"),
    "<-< ": ("mono", "solid", "normal"),
    "<-( ": ("hook_up", "solid", "normal"),
    "<--": ("none", "dashed", "normal"),
    "<..": ("none", "dotted", "normal"),
    "<-|": ("bar", "solid", "normal"),
    "<=": ("none", "double", "normal"),
}

_OFFSET_RE = re.compile(r"@<(-?\d+(?:\.\d+)?)pt>")
_TICK_RE = re.compile(r"\|-\*@\{([|+])\}")


def parse_arrow_spec(spec: str, constructor: str | None = None) -> ArrowStyle:
    """Canonicalize one spec string.

    Raw specs (leading @) pass through the same directional grammar after
    unwrapping, so parse("@{s}") == parse("s") for every supported s.
    """
    if spec.startswith("@"):
        return _parse_raw(spec, constructor)
    return _lookup(spec, spec, 0, constructor)


def _lookup(name: str, spec: str, pos: int, constructor: str | None) -> ArrowStyle:
    if name in _FORWARD:
        tail, shaft, head = _FORWARD[name]
        return ArrowStyle(tail=tail, shaft=shaft, head=head)
    if name in _REVERSED:
        tail, shaft, head = _REVERSED[name]
        return ArrowStyle(tail=tail, shaft=shaft, head=head, reversed=True)
    raise DiagnosticError(
        UNSUPPORTED_ARROW_SPEC,
        f"unsupported arrow spec {spec!r} at position {pos}",
        constructor=constructor,
    )


def _parse_raw(spec: str, constructor: str | None) -> ArrowStyle:
    if len(spec) < 2 or spec[1] != "{":
        raise DiagnosticError(
            UNSUPPORTED_ARROW_SPEC,
            f"unsupported arrow spec {spec!r} at position 1",
            constructor=constructor,
        )
    close = _matching_brace(spec, 1)
    if close < 0:
        raise DiagnosticError(
            UNSUPPORTED_ARROW_SPEC,
            f"unbalanced braces in arrow spec {spec!r} at position 1",
            constructor=constructor,
        )
    inner = spec[2:close]
    style = parse_arrow_spec(inner, constructor) if inner.startswith("@") \
        else _lookup(inner, spec, 2, constructor)

    rest = spec[close + 1:]
    pos = close + 1
    while rest:
        tick = _TICK_RE.match(rest)
        if tick:
            style = replace(style, mid="tick" if tick.group(1) == "|" else "cross")
            pos += tick.end()
            rest = rest[tick.end():]
            continue
        offset = _OFFSET_RE.match(rest)
        if offset:
            style = replace(style, parallel_offset_pt=float(offset.group(1)))
            pos += offset.end()
            rest = rest[offset.end():]
            continue
        raise DiagnosticError(
            UNSUPPORTED_ARROW_SPEC,
            f"unsupported arrow spec {spec!r} at position {pos}",
            constructor=constructor,
        )
    return style


def _matching_brace(s: str, open_at: int) -> int:
    depth = 0
    i = open_at
    while i < len(s):
        c = s[i]
        if c == "\\":
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return -1
