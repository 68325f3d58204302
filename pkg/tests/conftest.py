"""Folds the test_acceptance.py results into one line per criterion."""
import re

CRITERIA = {
    1: 'constructor defaults (placements, specs, spans; exact)',
    2: 'label side table, all 32 sign cases (exact)',
    3: 'pasted shapes equal their square decompositions (exact)',
    4: 'auto width matches the transcribed chain, clamp at 500 (exact)',
    5: 'twoar endpoints over [-5,5]^2 (exact)',
    6: 'all 4096 grid masks, popcount and endpoints (exact, <5s)',
    7: 'pullback corner and trident targets, randomized (exact)',
    8: 'translation equivariance, clipping, label anchors (1e-9 pt)',
    9: 'corpus compiles byte-identically twice, SVG well-formed',
    10: 'five error paths: diagnostic on stderr, exit status 1',
}

NODE_RE = re.compile(r'test_acceptance\.py::test_c(\d\d)')


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    passed = {}
    for status in ('passed', 'failed', 'error', 'skipped'):
        for report in terminalreporter.stats.get(status, ()):
            match = NODE_RE.search(getattr(report, 'nodeid', '') or '')
            if match is None:
                continue
            number = int(match.group(1))
            ok = status == 'passed'
            passed[number] = passed.get(number, True) and ok
    if not passed:
        return
    terminalreporter.section('acceptance criteria')
    for number in sorted(CRITERIA):
        if number in passed:
            verdict = 'PASS' if passed[number] else 'FAIL'
        else:
            verdict = 'not run'
        terminalreporter.write_line(
            'C%02d  %-58s %s' % (number, CRITERIA[number], verdict))
