"""Master/worker training loop."""

from dataclasses import replace

import numpy as np
import pytest

from lowprec_lab.constants import DEFAULT_MANTISSA_SWEEP
from lowprec_lab.errors import NonFiniteGradient, TrainingError
from lowprec_lab.linalg.densemat import OrthoMethod
from lowprec_lab.optim import AdamHyper, MuonHyper
from lowprec_lab.problems import ProblemKind, ProblemSpec
from lowprec_lab.quant.policy import QuantPolicy
from lowprec_lab.training import TrainConfig, run_reference_training, run_training, sweep
from lowprec_lab.training.loop import oracle_stream


def _sweep_tails(cfg):
    results = sweep(cfg, DEFAULT_MANTISSA_SWEEP, max_workers=3)
    return {M: r.tail_grad_norm for M, r in zip(DEFAULT_MANTISSA_SWEEP, results)}


def _assert_non_increasing(tails, slack=1.2):
    ordered = [tails[M] for M in sorted(tails)]
    for coarse, fine in zip(ordered, ordered[1:]):
        assert fine <= slack * coarse, tails


@pytest.fixture
def rosenbrock_cfg(small_rosenbrock):
    return TrainConfig(problem=replace(small_rosenbrock, noise_sigma=0.05), adam=AdamHyper(eta=1e-3),
                       T=40, seed=11)


class TestReferenceAgreement:

    def test_adam(self, rosenbrock_cfg):
        assert run_training(rosenbrock_cfg).checksum == run_reference_training(rosenbrock_cfg).checksum

    def test_muon(self, rosenbrock_cfg):
        cfg = replace(rosenbrock_cfg, optimizer="muon", muon=MuonHyper(eta=1e-3))
        assert run_training(cfg).checksum == run_reference_training(cfg).checksum

    def test_mlp_muon_with_auxiliary_adam(self, small_mlp):
        cfg = TrainConfig(problem=small_mlp, optimizer="muon", muon=MuonHyper(eta=1e-2), T=15,
                          batch_size=8, seed=4)
        assert cfg.effective_aux_adam == AdamHyper(eta=1e-2)
        assert run_training(cfg).checksum == run_reference_training(cfg).checksum

    def test_full_mantissa_is_the_identity(self, rosenbrock_cfg):
        full = run_training(rosenbrock_cfg.with_mantissa(52))
        assert full.checksum == run_training(rosenbrock_cfg).checksum
        assert all(r.qerr_W == 0.0 for r in full.records)


class TestDeterminism:

    def test_repeatable(self, rosenbrock_cfg):
        cfg = rosenbrock_cfg.with_mantissa(8)
        a, b = run_training(cfg), run_training(cfg)
        assert a.checksum == b.checksum
        assert a.records == b.records

    def test_thread_pool_does_not_change_result(self, rosenbrock_cfg):
        cfg = replace(rosenbrock_cfg.with_mantissa(8), B=3)
        assert run_training(replace(cfg, workers=3)).checksum == run_training(cfg).checksum

    def test_seed_changes_result(self, rosenbrock_cfg):
        cfg = rosenbrock_cfg.with_mantissa(8)
        assert run_training(cfg).checksum != run_training(replace(cfg, seed=12)).checksum

    def test_workers_draw_distinct_noise(self):
        a = oracle_stream(1, 0, 5).generator().random(4)
        b = oracle_stream(1, 1, 5).generator().random(4)
        assert not np.array_equal(a, b)


class TestRecords:

    def test_row_count_and_errors(self, rosenbrock_cfg):
        result = run_training(replace(rosenbrock_cfg.with_mantissa(6), telemetry_every=7))
        assert [r.t for r in result.records] == [0, 7, 14, 21, 28, 35]
        assert result.T == 40
        for r in result.records:
            for q in (r.qerr_W, r.qerr_G, r.qerr_M, r.qerr_V):
                assert q is not None and 0.0 <= q <= 2.0 ** -6
            assert r.wall_ns is None

    def test_unquantised_components_report_none(self, rosenbrock_cfg):
        result = run_training(rosenbrock_cfg.with_mantissa(8, ["gradients"]))
        assert all(r.qerr_W is None and r.qerr_M is None and r.qerr_G is not None for r in result.records)

    def test_first_row_is_initial_point(self, rosenbrock_cfg):
        result = run_training(rosenbrock_cfg)
        assert result.records[0].loss == result.stats.initial_loss
        assert result.records[0].grad_norm_F == result.grad_norm_history[0]
        assert result.stats.initial_weight_norm > 0.0
        assert result.stats.lipschitz_estimate > 0.0

    def test_wall_time(self, rosenbrock_cfg):
        result = run_training(replace(rosenbrock_cfg, T=3, record_wall_time=True))
        assert all(r.wall_ns is not None and r.wall_ns >= 0 for r in result.records)

    def test_weight_decay_changes_trajectory(self, rosenbrock_cfg):
        decayed = run_training(replace(rosenbrock_cfg, weight_decay=0.1))
        assert decayed.checksum != run_training(rosenbrock_cfg).checksum
        assert decayed.checksum == run_reference_training(replace(rosenbrock_cfg, weight_decay=0.1)).checksum


class TestFailures:

    def test_iteration_is_reported(self, rosenbrock_cfg, monkeypatch):
        def poisoned(samples):
            return [np.full_like(g, np.nan) for g in samples[0]]

        monkeypatch.setattr("lowprec_lab.training.loop.average_blocks", poisoned)
        with pytest.raises(TrainingError) as info:
            run_training(rosenbrock_cfg)
        assert info.value.iteration == 0
        assert isinstance(info.value.__cause__, NonFiniteGradient)

    @pytest.mark.parametrize("kwargs", [{"T": 0}, {"B": 0}, {"seed": -1}, {"telemetry_every": 0},
                                        {"workers": 0}, {"weight_decay": -1.0}])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


class TestSweep:

    def test_order_follows_mantissas(self, rosenbrock_cfg):
        results = sweep(replace(rosenbrock_cfg, T=10), [8, 4])
        assert [r.config["policy.weights.mantissa_bits"] for r in results] == [8, 4]

    def test_component_subset(self, rosenbrock_cfg):
        (result,) = sweep(replace(rosenbrock_cfg, T=5), [8], components=["moment2"])
        assert result.records[0].qerr_V is not None
        assert result.records[0].qerr_G is None

    def test_empty(self, rosenbrock_cfg):
        with pytest.raises(ValueError):
            sweep(rosenbrock_cfg, [])

    @pytest.mark.slow
    def test_rosenbrock_adam_precision_ordering(self):
        cfg = TrainConfig(problem=ProblemSpec(kind=ProblemKind.ROSENBROCK, m=50, n=100),
                          adam=AdamHyper(eta=5e-4), T=10_000, seed=0)
        tails = _sweep_tails(cfg)
        _assert_non_increasing(tails)
        assert tails[24] <= 1.1 * tails[52]

    @pytest.mark.slow
    def test_rosenbrock_muon_precision_ordering(self):
        base = TrainConfig(problem=ProblemSpec(kind=ProblemKind.ROSENBROCK, m=50, n=100), optimizer="muon",
                           T=10_000, seed=0)
        tails = {}
        for method in OrthoMethod:
            cfg = replace(base, muon=MuonHyper(eta=5e-4, beta=0.9, ortho_method=method))
            tails[method] = _sweep_tails(cfg)
            _assert_non_increasing(tails[method])
        exact, ns = tails[OrthoMethod.EXACT_SVD][52], tails[OrthoMethod.NEWTON_SCHULZ][52]
        assert max(exact, ns) <= 2.0 * min(exact, ns)
