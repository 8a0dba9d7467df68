"""Acceptance gate: every criterion prints one PASS/FAIL line and must pass."""

import pytest

from dioph.acceptance import CRITERIA, run_criterion

SEED = 20260823


@pytest.mark.parametrize("index,name", [(i, n) for i, n, _ in CRITERIA])
def test_criterion(index, name, capsys):
    result = run_criterion(index, seed=SEED)
    with capsys.disabled():
        status = "PASS" if result.passed else "FAIL"
        print(f"ACCEPTANCE {result.index} {result.name}: {status} ({result.detail})")
    assert result.name == name
    assert result.passed, result.detail
