"""
Tests for the acceptance suite.
"""

import pytest

from qequil.models.run import CheckResult
from qequil.services import reproduce


class TestChecks:
    """Individual checks recompute their numbers."""

    @pytest.mark.parametrize(
        "check",
        [
            reproduce.check_additive_optimum,
            reproduce.check_multiplicative_optimum,
            reproduce.check_non_concavity,
            reproduce.check_cyclic_ratio,
            reproduce.check_hjmr,
        ],
    )
    def test_fast_checks_pass(self, check):
        result = check()
        assert isinstance(result, CheckResult)
        assert result.passed, result.detail

    def test_mixture_and_swap_small_sample(self):
        result = reproduce.check_mixture_and_swap(samples=3, seed=5)
        assert result.passed, result.detail
        assert result.metrics["samples"] == 3

    def test_factorization_protocols_small_sample(self):
        result = reproduce.check_factorization_protocols(samples=20, seed=2)
        assert result.passed, result.detail
        assert result.metrics["max_error"] <= 1e-10

    def test_ed_separation(self):
        result = reproduce.check_ed_separation()
        assert result.passed, result.detail
        assert result.metrics["n3_bounds"] == [3, 3]


class TestRunAll:
    """Selection, ordering and report shapes."""

    def test_only_selects_checks(self):
        report = reproduce.run_all(only=[3, 1])
        assert [c.number for c in report.checks] == [1, 3]
        assert report.passed

    def test_parallel_keeps_numbering(self):
        report = reproduce.run_all(only=[1, 2, 3], jobs=3)
        assert [c.number for c in report.checks] == [1, 2, 3]

    def test_failing_check_is_reported(self, mocker):
        mocker.patch.object(
            reproduce, "CHECKS", [lambda **_: CheckResult(1, "always fails", False, "forced")]
        )
        report = reproduce.run_all()
        assert not report.passed
        assert report.failures[0].name == "always fails"

    def test_report_rows(self):
        report = reproduce.run_all(only=[3])
        rows = reproduce.report_rows(report)
        assert rows[0]["number"] == 3
        assert rows[0]["name"] == "non-concavity witness"
        assert rows[0]["passed"] is True

    def test_report_table(self):
        table = reproduce.report_table(reproduce.run_all(only=[1]))
        assert table.row_count == 1

    @pytest.mark.slow
    def test_full_suite(self):
        report = reproduce.run_all(samples=20, factorizations=20)
        assert len(report.checks) == len(reproduce.CHECKS)
        assert report.passed, [c.detail for c in report.failures]
