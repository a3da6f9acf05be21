"""Randomised certification of the supporting inequalities."""

import math

import pytest

from lowprec_lab.errors import LemmaViolated
from lowprec_lab.theory.lemmas import LEMMAS, LemmaResult, LemmaSuiteReport, check_lemma, check_lemma_suite


@pytest.mark.parametrize("name", list(LEMMAS))
def test_lemma_holds(name):
    result = check_lemma(name, seed=0, trials=200)
    assert result.trials == 200
    assert result.violations == 0, result.witness
    assert result.max_ratio <= 1.0 + 1e-9


def test_suite_order_and_subset():
    report = check_lemma_suite(seed=1, trials=5)
    assert [r.name for r in report.results] == list(LEMMAS)
    assert report.passed
    subset = check_lemma_suite(seed=1, trials=5, names=["finite_cauchy", "muon_update_norm"])
    assert [r.name for r in subset.results] == ["finite_cauchy", "muon_update_norm"]


def test_suite_is_reproducible():
    a = check_lemma("refined_cauchy", seed=3, trials=20)
    b = check_lemma("refined_cauchy", seed=3, trials=20)
    assert a.max_ratio == b.max_ratio


def test_invalid_requests():
    with pytest.raises(ValueError):
        check_lemma_suite(trials=0)
    with pytest.raises(KeyError):
        check_lemma("no_such_lemma", seed=0, trials=1)
    with pytest.raises(KeyError):
        check_lemma_suite(trials=1, names=["finite_cauchy"]).result("moment_sandwich")


class TestLemmaResult:

    def test_zero_rhs(self):
        result = LemmaResult(name="x")
        result.record(0.0, 0.0, {})
        assert result.max_ratio == 0.0 and result.passed
        result.record(1.0, 0.0, {"a": 1})
        assert result.max_ratio == math.inf
        assert result.witness == {"a": 1, "lhs": 1.0, "rhs": 0.0}

    def test_tolerance(self):
        result = LemmaResult(name="x")
        result.record(1.0 + 1e-14, 1.0, {})
        assert result.passed
        result.record(1.0 + 1e-9, 1.0, {"trial": 7})
        assert result.violations == 1
        assert result.witness["trial"] == 7

    def test_first_witness_is_kept(self):
        result = LemmaResult(name="x")
        result.record(2.0, 1.0, {"trial": 0})
        result.record(3.0, 1.0, {"trial": 1})
        assert result.violations == 2
        assert result.witness["trial"] == 0

    def test_raise_for_violations(self):
        bad = LemmaResult(name="x")
        bad.record(2.0, 1.0, {})
        report = LemmaSuiteReport(seed=0, trials=1, results=[LemmaResult(name="ok"), bad])
        assert report.violations == 1
        with pytest.raises(LemmaViolated, match="lemma x violated"):
            report.raise_for_violations()


@pytest.mark.slow
def test_full_suite():
    check_lemma_suite(seed=0, trials=10_000, strict=True)
