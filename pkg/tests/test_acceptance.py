"""One test per acceptance criterion; the terminal summary lists PASS/FAIL lines."""

import pytest

from finsler_iso.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("criterion", CRITERIA, ids=[fn.__name__ for fn in CRITERIA])
def test_criterion(criterion, acceptance_log):
    number = int(criterion.__name__.split("_")[0][2:])
    try:
        res = run_criterion(criterion)
    except Exception as exc:
        acceptance_log.append(f"AC{number:<2d} FAIL  {criterion.__name__}: {type(exc).__name__}: {exc}")
        raise
    line = res.line()
    acceptance_log.append(line)
    print(line)
    assert res.passed, line
