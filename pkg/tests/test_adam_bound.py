"""Adam convergence bound."""

import math
from dataclasses import replace

import pytest

from lowprec_lab.errors import PreconditionViolated
from lowprec_lab.theory.adam_bound import (
    ADAM_TERMS,
    PRE_FIRST_MOMENT,
    PRE_HORIZON,
    PRE_SECOND_MOMENT,
    AdamBoundInput,
    adam_bound,
    adam_bound_detailed,
    adam_preconditions,
    adam_schedule_grid,
    decayed_count,
)

Q8 = 2.0 ** -8


@pytest.fixture
def base():
    return AdamBoundInput(T=10_000, d=5000, eta=5e-4, q_W=Q8, q_G=Q8, q_M=Q8, q_V=Q8)


class TestPreconditions:

    def test_all_failures_are_named(self):
        p = AdamBoundInput(T=1000, d=10, eta=1e-3, beta1=0.99, beta2=0.9)
        assert adam_preconditions(p) == [PRE_SECOND_MOMENT, PRE_FIRST_MOMENT]
        with pytest.raises(PreconditionViolated) as info:
            adam_bound(p)
        assert info.value.names == [PRE_SECOND_MOMENT, PRE_FIRST_MOMENT]
        assert PRE_FIRST_MOMENT in str(info.value)

    def test_horizon(self):
        p = AdamBoundInput(T=5, d=10, eta=1e-3)
        assert adam_preconditions(p) == [PRE_HORIZON]
        with pytest.raises(PreconditionViolated):
            adam_bound_detailed(p)

    def test_quantisation_can_break_them(self, base):
        assert adam_preconditions(replace(base, q_M=0.107)) == [PRE_FIRST_MOMENT]

    @pytest.mark.parametrize("kwargs", [{"T": 0}, {"eta": 0.0}, {"beta1": 1.0}, {"q_V": 1.0}, {"R": -1.0}])
    def test_invalid_input(self, kwargs):
        with pytest.raises(ValueError):
            AdamBoundInput(**{"T": 100, "d": 1, "eta": 1e-3, **kwargs})


class TestTerms:

    def test_report_layout(self, base):
        report = adam_bound(base)
        assert tuple(report.terms) == ADAM_TERMS
        assert report.total == pytest.approx(sum(report.terms.values()))
        assert report.grad_norm_bound == pytest.approx(math.sqrt(report.total))
        keys = list(report.as_dict())
        assert keys == sorted(keys)
        assert report.r_prime == pytest.approx(0.81 * (1 + Q8) ** 2 / (0.999 * (1 - Q8)))

    def test_full_precision_has_no_quantisation_cost(self, base):
        report = adam_bound(replace(base, q_W=0.0, q_G=0.0, q_M=0.0, q_V=0.0))
        assert report.terms["Qtilde_over_T"] == 0.0
        assert report.terms["wg_term"] == 0.0
        assert report.terms["weight_growth_term"] == 0.0
        assert report.terms["initial"] == pytest.approx(4.0 * 1.0 / (5e-4 * 10_000))

    @pytest.mark.parametrize("name", ["q_W", "q_G", "q_M", "q_V"])
    def test_monotone_in_each_error_bound(self, base, name):
        totals = [adam_bound(replace(base, **{name: q})).total for q in (0.0, 2.0 ** -16, Q8, 2.0 ** -6)]
        assert totals == sorted(totals)
        assert totals[0] < totals[-1]

    def test_weight_growth_is_linear_in_step_size(self, base):
        single = adam_bound(base).terms["weight_growth_term"]
        doubled = adam_bound(replace(base, eta=2.0 * base.eta)).terms["weight_growth_term"]
        assert doubled == pytest.approx(2.0 * single, rel=1e-12)

    def test_initial_term_shrinks_with_horizon(self, base):
        assert adam_bound(replace(base, T=100_000)).terms["initial"] < adam_bound(base).terms["initial"]


class TestDecayedCount:

    def test_limits(self):
        assert decayed_count(0.0, 500) == 500.0
        assert decayed_count(1e-15, 500) == pytest.approx(500.0, rel=1e-9)
        assert decayed_count(0.5, 1) == pytest.approx(0.5)
        assert decayed_count(0.5, 200) == pytest.approx(1.0)

    def test_tiny_second_moment_error_is_nearly_free(self, base):
        p = replace(base, q_G=0.0, q_M=0.0)
        tiny = adam_bound(replace(p, q_V=1e-12)).terms["Qtilde_over_T"]
        large = adam_bound(replace(p, q_V=1e-2)).terms["Qtilde_over_T"]
        assert 0.0 <= tiny <= 1e-6 * large


class TestDetailed:

    @pytest.mark.parametrize("T", [20, 100, 10_000, 1_000_000])
    def test_never_above_simplified_without_second_moment_error(self, base, T):
        p = replace(base, T=T, q_V=0.0)
        assert adam_bound_detailed(p).total <= adam_bound(p).total

    def test_constants(self, base):
        report = adam_bound_detailed(base)
        assert report.constants["T_eff"] == pytest.approx(10_000 - 9.0)
        assert report.C == pytest.approx(2.0 * (report.constants["E"] + report.constants["H"]))


class TestScheduleGrid:

    def test_rate(self, base):
        rows = adam_schedule_grid([10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6], base)
        assert [r["T"] for r in rows] == [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
        totals = [r["total"] for r in rows]
        assert totals == sorted(totals, reverse=True)
        normalized = [r["normalized"] for r in rows]
        for a, b in zip(normalized, normalized[1:]):
            assert b <= 1.05 * a
