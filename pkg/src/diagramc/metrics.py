"""Glyph advance tables and the integer width arithmetic built on them.

Widths are kept in integer milli-em so the truncating division chains below
stay exact; IEEE floor-after-float-division gets 100/2/0.1 wrong.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Set

from .model import DEFAULT_MARGIN, RenderConfig

DEFAULT_ADVANCE = 500      # milli-em, every printable ASCII glyph
DEFAULT_ASCENT = 700
DEFAULT_DESCENT = 300

# One logical unit is 0.01 em == 10 milli-em.
_UNIT_MILLI_EM = 10

# A token is a control word, a control symbol, or a single character.
_TOKEN_RE = re.compile(r"\\[A-Za-z]+|\\.|.", re.DOTALL)

# Escaped specials measure like ordinary glyphs; no warning for these.
_ESCAPED_SPECIALS = ("\\%", "\\&", "\\#", "\\_", "\\$", "\\{", "\\}")


def _builtin_advances() -> Dict[str, int]:
    table = {chr(c): DEFAULT_ADVANCE for c in range(0x20, 0x7F)}
    for seq in _ESCAPED_SPECIALS:
        table[seq] = DEFAULT_ADVANCE
    return table


@dataclass(frozen=True)
class MetricsTable:
    """Immutable advance table; safe for concurrent reads."""

    advances: Dict[str, int] = field(default_factory=_builtin_advances)
    fallback: int = DEFAULT_ADVANCE
    ascent: int = DEFAULT_ASCENT    # milli-em above the baseline
    descent: int = DEFAULT_DESCENT  # milli-em below the baseline

    @classmethod
    def builtin(cls) -> "MetricsTable":
        return cls()

    @classmethod
    def from_file(cls, path: str) -> "MetricsTable":
        """Load `<codepoint-or-char> <advance-milli-em>` lines over the builtin table.

        `fallback`, `ascent` and `descent` lines override the corresponding
        defaults; `#` starts a comment.  Keys may be a literal character, a
        decimal codepoint, U+XXXX, or a control word like \\alpha.
        """
        advances = _builtin_advances()
        fallback = DEFAULT_ADVANCE
        ascent, descent = DEFAULT_ASCENT, DEFAULT_DESCENT
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected '<key> <advance>'")
                key, value = parts
                try:
                    advance = int(value)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: advance must be an integer") from None
                if key == "fallback":
                    fallback = advance
                elif key == "ascent":
                    ascent = advance
                elif key == "descent":
                    descent = advance
                else:
                    advances[_parse_key(key, path, lineno)] = advance
        return cls(advances=advances, fallback=fallback, ascent=ascent, descent=descent)

    # -- raw advances -------------------------------------------------------

    def token_advance(self, token: str) -> int:
        return self.advances.get(token, self.fallback)

    def text_advance(self, text: str, scale: float = 1.0) -> int:
        """Sum of advances in milli-em; no kerning, no math spacing."""
        total = sum(self.token_advance(t) for t in _TOKEN_RE.findall(text))
        if scale == 1.0:
            return total
        return int(total * scale)

    def unknown_tokens(self, text: str) -> Set[str]:
        return {t for t in _TOKEN_RE.findall(text) if t not in self.advances}

    # -- physical and logical widths ---------------------------------------

    def measure(self, text: str, cfg: RenderConfig) -> float:
        """Width of text in points at full size."""
        return self.text_advance(text) * cfg.em_pt / 1000.0

    def morphism_width(self, node_a: str, node_b: str, label: str, cfg: RenderConfig) -> int:
        """Auto width in logical units for an edge between node_a and node_b.

        Measures node_a ++ label ++ label ++ node_b, halves it, converts to
        units, pads by 350 and clamps at 500.  Divisions truncate in source
        order; done in milli-em where the em factor cancels exactly.
        """
        total = (
            self.text_advance(node_a)
            + 2 * self.text_advance(label, cfg.label_scale)
            + self.text_advance(node_b)
        )
        width = total // 2 // _UNIT_MILLI_EM
        return max(width + 350, 500)

    def inline_length(self, sup: str, sub: str, floor_units: int, cfg: RenderConfig) -> int:
        """Length in logical units of an inline arrow under its two labels."""
        widest = max(self.text_advance(sup, cfg.label_scale),
                     self.text_advance(sub, cfg.label_scale))
        return max(widest // _UNIT_MILLI_EM + DEFAULT_MARGIN, floor_units)

    def box_height_milli_em(self) -> int:
        return self.ascent + self.descent


def _parse_key(key: str, path: str, lineno: int) -> str:
    if len(key) == 1 or key.startswith("\\"):
        return key
    if key.upper().startswith("U+"):
        return chr(int(key[2:], 16))
    if key.isdigit():
        return chr(int(key))
    raise ValueError(f"{path}:{lineno}: bad key {key!r}")
