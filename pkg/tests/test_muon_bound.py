"""Muon convergence bound."""

from dataclasses import replace

import pytest

from lowprec_lab.errors import PreconditionViolated
from lowprec_lab.theory.muon_bound import (
    MUON_TERMS,
    PRE_MOMENTUM,
    MuonBoundInput,
    muon_bound,
    muon_preconditions,
    muon_schedule_grid,
    muon_schedule_input,
)

Q8 = 2.0 ** -8


@pytest.fixture
def base():
    return MuonBoundInput(T=10_000, eta=5e-4, beta=0.9, r=50, sigma=0.5, q_G=Q8, q_W=Q8, q_M=Q8)


class TestMuonBound:

    def test_precondition(self, base):
        p = replace(base, q_M=0.2)
        assert muon_preconditions(p) == [PRE_MOMENTUM]
        with pytest.raises(PreconditionViolated, match="β"):
            muon_bound(p)

    def test_report_layout(self, base):
        report = muon_bound(base)
        assert tuple(report.terms) == MUON_TERMS
        assert report.total == pytest.approx(sum(report.terms.values()))
        keys = list(report.as_dict())
        assert keys == sorted(keys)

    def test_full_precision(self, base):
        report = muon_bound(replace(base, q_G=0.0, q_W=0.0, q_M=0.0))
        assert report.quantization_unit == 0.0
        assert report.terms["quantization"] == 0.0

    def test_noise_terms_scale_with_sigma(self, base):
        a = muon_bound(base).terms
        b = muon_bound(replace(base, sigma=1.0)).terms
        assert b["noise_transient"] == pytest.approx(2.0 * a["noise_transient"])
        assert b["noise_stationary"] == pytest.approx(2.0 * a["noise_stationary"])
        assert b["initial"] == a["initial"]

    def test_batch_reduces_noise(self, base):
        a = muon_bound(base).terms["noise_stationary"]
        assert muon_bound(replace(base, B=4)).terms["noise_stationary"] == pytest.approx(a / 2.0)

    def test_quantisation_is_linear_in_C2(self, base):
        a = muon_bound(base)
        b = muon_bound(replace(base, C2=3.0))
        assert b.terms["quantization"] == pytest.approx(3.0 * a.terms["quantization"])
        assert b.quantization_unit == a.quantization_unit

    def test_explicit_block_needs_G_and_D(self, base):
        assert muon_bound(base).explicit_total is None
        assert muon_bound(replace(base, G=2.0)).explicit_total is None
        report = muon_bound(replace(base, G=2.0, D=3.0))
        assert report.explicit_quantization > 0.0
        assert report.explicit_total == pytest.approx(
            report.total - report.terms["quantization"] + report.explicit_quantization)
        assert "explicit_total" in report.as_dict()

    def test_explicit_block_vanishes_at_full_precision(self, base):
        report = muon_bound(replace(base, q_G=0.0, q_W=0.0, q_M=0.0, G=2.0, D=3.0))
        assert report.explicit_quantization == 0.0


class TestSchedule:

    def test_input(self, base):
        p = muon_schedule_input(10_000, base)
        assert p.eta == pytest.approx(1e-3)
        assert p.beta == pytest.approx(0.99)
        assert p.q_G == pytest.approx(1e-2) and p.q_M == pytest.approx(1e-4)
        assert p.B == 1 and p.r == base.r

    def test_quarter_rate(self, base):
        rows = muon_schedule_grid([10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6], replace(base, sigma=0.0))
        normalized = [r["normalized"] for r in rows]
        for a, b in zip(normalized, normalized[1:]):
            assert b <= 1.05 * a
