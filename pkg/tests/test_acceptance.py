"""Acceptance gate: one pass/fail line per criterion, each at its stated tolerance."""

import pytest

from su2lgt.acceptance import CRITERIA, format_result, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=[f"c{n:02d}-{CRITERIA[n][0].replace(' ', '-')}" for n in sorted(CRITERIA)])
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print("\n" + format_result(result))
    assert result.passed, result.detail
