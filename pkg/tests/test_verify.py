"""Verification harness: report formatting and sensitivity."""

import json

import pytest

from planarsio.verify import Check, SuiteReport, check_closed_forms, run_suite


def test_check_line_format():
    chk = Check("demo", 3, False, {"err": 0.5, "sizes": [1, 2]}, {"err<=": 0.1}, 1.25)
    assert chk.line() == "[FAIL] criterion 3 demo: err=5.000e-01, sizes=[1, 2] (limits: err<=1.000e-01; 1.2s)"


def test_suite_report_passes_only_if_every_check_passes():
    rep = SuiteReport("identities", 42, "0")
    rep.checks = [Check("a", 1, True, {}, {}), Check("b", 2, True, {}, {})]
    assert rep.passed
    rep.checks.append(Check("c", 3, False, {}, {}))
    assert not rep.passed
    assert json.loads(rep.to_json())["passed"] is False


def test_unknown_suite_is_rejected():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nonsense")


def test_closed_form_check_detects_flipped_kernel():
    good = check_closed_forms(n=128)
    bad = check_closed_forms(n=128, corrupt=True)
    assert good.passed
    assert not bad.passed
