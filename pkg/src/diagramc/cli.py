"""Command line driver.

Compiles each input file independently: parse, lower, then write the
requested scene and SVG outputs.  A file with several figure or inline
units numbers its outputs ``name.1.svg``, ``name.2.svg``, and so on; a
single unit writes plain ``name.svg``.

Exit status: 0 when everything compiled, 1 when any file failed with a
diagnostic, 2 for invocation problems such as unreadable inputs or a bad
metrics table.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import DiagnosticError
from .lowering import Lowerer
from .metrics import MetricsTable
from .model import RenderConfig, Scene
from .parser import parse_document
from .scenefile import dump_scene
from .svg import render

METRICS_ENV = 'DIAGRAMC_METRICS'


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog='diagramc',
        description='Compile commutative diagram sources to SVG and '
                    'structured scene files.')
    p.add_argument('inputs', nargs='+', metavar='FILE',
                   help='diagram source files')
    p.add_argument('--format', choices=('scene', 'svg', 'both'),
                   default='both', help='which outputs to write')
    p.add_argument('-o', '--out-dir', metavar='DIR',
                   help='output directory (default: next to each input)')
    p.add_argument('--em-pt', type=float, default=10.0, metavar='PT',
                   help='font size; one em in points')
    p.add_argument('--margin-pt', type=float, default=3.0, metavar='PT',
                   help='clearance between node text and arrow ends')
    p.add_argument('--metrics', metavar='FILE',
                   help='glyph advance table '
                        '(default: $%s, then builtin)' % METRICS_ENV)
    p.add_argument('--label-scale', type=float, default=1.0, metavar='S',
                   help='label size relative to node text')
    p.add_argument('--strict', action='store_true',
                   help='fail on glyphs missing from the metrics table')
    return p


def _diagnostic_line(err: DiagnosticError, path: str) -> str:
    if err.loc is None:
        ctor = ' [in \\%s]' % err.constructor if err.constructor else ''
        return '%s: error: %s: %s%s' % (path, err.code, err.message, ctor)
    return err.format()


def _unit_texts(unit: Scene):
    for node in unit.nodes:
        yield node.text
    for arrow in unit.arrows:
        yield arrow.label
    for fragment in unit.inlines:
        for part in fragment.parts:
            yield part.sup
            yield part.sub
            yield part.mid


def _scan_glyphs(units: list[Scene], metrics: MetricsTable) -> list[str]:
    unknown: set[str] = set()
    for unit in units:
        for text in _unit_texts(unit):
            unknown |= metrics.unknown_tokens(text)
    return sorted(unknown)


def _output_paths(path: str, out_dir: str | None, count: int, ext: str
                  ) -> list[str]:
    stem = os.path.splitext(os.path.basename(path))[0]
    directory = out_dir if out_dir is not None else (
        os.path.dirname(path) or '.')
    if count == 1:
        return [os.path.join(directory, '%s.%s' % (stem, ext))]
    return [os.path.join(directory, '%s.%d.%s' % (stem, n + 1, ext))
            for n in range(count)]


def _write(path: str, text: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(text)


def _compile_file(path: str, args: argparse.Namespace,
                  metrics: MetricsTable, cfg: RenderConfig) -> int:
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as exc:
        print('%s: error: %s' % (path, exc.strerror or exc), file=sys.stderr)
        return 2
    try:
        statements = parse_document(text, filename=path)
        units = Lowerer(metrics, cfg).lower_document(statements)
    except DiagnosticError as err:
        print(_diagnostic_line(err, path), file=sys.stderr)
        return 1
    unknown = _scan_glyphs(units, metrics)
    if unknown:
        severity = 'error' if args.strict else 'warning'
        for glyph in unknown:
            print('%s: %s: no metrics for %r; using the fallback advance'
                  % (path, severity, glyph), file=sys.stderr)
        if args.strict:
            return 1
    scenes = args.format in ('scene', 'both')
    svgs = args.format in ('svg', 'both')
    try:
        rendered = [render(unit, metrics, cfg) for unit in units] if svgs else []
    except DiagnosticError as err:
        print(_diagnostic_line(err, path), file=sys.stderr)
        return 1
    if scenes:
        for out, unit in zip(
                _output_paths(path, args.out_dir, len(units), 'scene.json'),
                units):
            _write(out, dump_scene(unit))
    if svgs:
        for out, document in zip(
                _output_paths(path, args.out_dir, len(units), 'svg'),
                rendered):
            _write(out, document)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    metrics_path = args.metrics or os.environ.get(METRICS_ENV)
    try:
        metrics = (MetricsTable.from_file(metrics_path) if metrics_path
                   else MetricsTable.builtin())
    except (OSError, ValueError) as exc:
        print('diagramc: error: %s' % exc, file=sys.stderr)
        return 2
    try:
        cfg = RenderConfig(em_pt=args.em_pt,
                           object_margin_pt=args.margin_pt,
                           label_scale=args.label_scale)
    except ValueError as exc:
        print('diagramc: error: %s' % exc, file=sys.stderr)
        return 2
    if args.out_dir is not None:
        try:
            os.makedirs(args.out_dir, exist_ok=True)
        except OSError as exc:
            print('diagramc: error: %s' % exc, file=sys.stderr)
            return 2
    status = 0
    for path in args.inputs:
        status = max(status, _compile_file(path, args, metrics, cfg))
    return status


if __name__ == '__main__':
    sys.exit(main())
