"""Acceptance criteria 1-11 at their stated tolerances and time limits.

Each test prints one ``[PASS]``/``[FAIL]`` line, visible even without ``-s``.
"""

import pytest

from subbergman.acceptance import CRITERIA, run_criterion

NUMBERS = sorted(CRITERIA) + [11]


@pytest.mark.parametrize("number", NUMBERS, ids=[f"criterion-{n}" for n in NUMBERS])
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
