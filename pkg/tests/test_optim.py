"""Quantised Adam and Muon steps, their references and state snapshots."""

import math

import numpy as np
import pytest

from lowprec_lab.errors import DimMismatch, FormatError, NonFiniteGradient
from lowprec_lab.linalg.densemat import OrthoMethod, frob_norm
from lowprec_lab.optim import (
    AdamHyper,
    AdamVariant,
    MuonHyper,
    QuantizedAdam,
    QuantizedMuon,
    ReferenceAdam,
    ReferenceMuon,
    Schedule,
    adam_equivalence_probe,
    adam_init,
    adam_step,
    alternating_deltas,
    average_blocks,
    load_state,
    muon_init,
    muon_step,
    omega,
    save_state,
)
from lowprec_lab.problems import rosenbrock_grad
from lowprec_lab.quant.fpquant import QuantSpec, Rounding, quantize_mat
from lowprec_lab.quant.policy import QuantPolicy
from lowprec_lab.quant.rng import RngStream


def _start(gen, shape=(4, 6)):
    return 1.0 + 0.2 * gen.standard_normal(shape)


class TestHyper:

    def test_omega(self):
        assert omega(0.999, 0) == 0.0
        assert omega(0.999, 1) == 1.0
        assert omega(0.5, 2) == pytest.approx(math.sqrt(1.5))

    def test_schedules_at_first_step(self):
        paper = AdamHyper(eta=1e-2, beta1=0.9, schedule=Schedule.PAPER_OMEGA)
        assert paper.step_size(0) == pytest.approx(0.1 * 1e-2)
        standard = AdamHyper(eta=1e-2, beta1=0.9, schedule=Schedule.STANDARD_BIAS)
        assert standard.step_size(0) == pytest.approx(1e-2)
        assert AdamHyper(eta=1e-2).step_size(500) == 1e-2

    def test_paper_schedule_approaches_limit(self):
        h = AdamHyper(eta=1e-2, beta2=0.99, schedule="paper_omega")
        assert h.step_size(5000) == pytest.approx(h.step_size_limit, rel=1e-9)
        assert h.step_size(10) < h.step_size(100)

    @pytest.mark.parametrize("kwargs", [{"eta": 0.0}, {"beta1": 1.0}, {"beta2": 0.0}, {"epsilon": -1.0}])
    def test_invalid_adam(self, kwargs):
        with pytest.raises(ValueError):
            AdamHyper(**kwargs)

    def test_invalid_muon(self):
        with pytest.raises(ValueError):
            MuonHyper(beta=1.5)
        with pytest.raises(ValueError):
            MuonHyper(ns_coeffs=(1.0, 2.0))


class TestAdamStep:

    @pytest.mark.parametrize("variant", list(AdamVariant))
    @pytest.mark.parametrize("schedule", list(Schedule))
    def test_disabled_policy_matches_reference_bitwise(self, gen, variant, schedule):
        h = AdamHyper(eta=1e-3, schedule=schedule, variant=variant)
        W = _start(gen)
        ref_W = [W.copy()]
        ref = ReferenceAdam(h)
        state = adam_init(W, variant)
        for _ in range(25):
            G = rosenbrock_grad(W)
            ref.step(ref_W, [rosenbrock_grad(ref_W[0])])
            W, state = adam_step(W, G, h, state, QuantPolicy.disabled())
            np.testing.assert_array_equal(W, ref_W[0])
        assert state.t == 25
        assert state.qerr_m is None and state.qerr_v is None

    def test_weighted_average_matches_weighted_sum(self, gen):
        W_sum = W_avg = _start(gen)
        s_sum = adam_init(W_sum, AdamVariant.WEIGHTED_SUM)
        s_avg = adam_init(W_avg, AdamVariant.WEIGHTED_AVERAGE)
        h_sum = AdamHyper(eta=1e-3)
        h_avg = AdamHyper(eta=1e-3, variant=AdamVariant.WEIGHTED_AVERAGE)
        for _ in range(20):
            W_sum, s_sum = adam_step(W_sum, rosenbrock_grad(W_sum), h_sum, s_sum, QuantPolicy.disabled())
            W_avg, s_avg = adam_step(W_avg, rosenbrock_grad(W_avg), h_avg, s_avg, QuantPolicy.disabled())
        np.testing.assert_allclose(W_avg, W_sum, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(s_avg.M[0], 0.1 * s_sum.M[0], rtol=1e-9, atol=1e-12)

    def test_stored_moments_are_representable(self, gen, stream):
        h = AdamHyper(eta=1e-3)
        policy = QuantPolicy.uniform(8, components=["moment1", "moment2"])
        W, state = _start(gen), adam_init(np.zeros((4, 6)))
        for t in range(5):
            W, state = adam_step(W, rosenbrock_grad(W), h, state, policy, stream.advance(t))
        again = QuantSpec(mantissa_bits=8, rounding=Rounding.NEAREST_EVEN, enabled=True)
        np.testing.assert_array_equal(quantize_mat(state.M[0], again), state.M[0])
        np.testing.assert_array_equal(quantize_mat(state.V[0], again), state.V[0])
        assert 0.0 <= state.qerr_m <= 2.0 ** -8
        assert 0.0 <= state.qerr_v <= 2.0 ** -8

    def test_block_lists(self, gen):
        W = [gen.standard_normal((3, 2)), gen.standard_normal(2)]
        G = [np.ones((3, 2)), np.ones(2)]
        new_W, state = adam_step(W, G, AdamHyper(eta=0.1), adam_init(W), QuantPolicy.disabled())
        assert isinstance(new_W, list) and len(new_W) == 2
        # first weighted-sum step moves every entry by eta / sqrt(1 + eps)
        np.testing.assert_allclose(W[1] - new_W[1], 0.1 / math.sqrt(1.0 + 1e-8))

    def test_non_finite_gradient(self):
        W = np.zeros((2, 2))
        with pytest.raises(NonFiniteGradient):
            adam_step(W, np.full((2, 2), np.nan), AdamHyper(), adam_init(W), QuantPolicy.disabled())

    def test_shape_mismatch(self):
        W = np.zeros((2, 2))
        with pytest.raises(DimMismatch):
            adam_step(W, np.zeros((2, 3)), AdamHyper(), adam_init(W), QuantPolicy.disabled())


class TestMuonStep:

    @pytest.mark.parametrize("method", list(OrthoMethod))
    def test_disabled_policy_matches_reference_bitwise(self, gen, method):
        h = MuonHyper(eta=1e-3, ortho_method=method)
        W = _start(gen)
        ref_W = [W.copy()]
        ref = ReferenceMuon(h)
        state = muon_init(W)
        for _ in range(15):
            G = rosenbrock_grad(W)
            ref.step(ref_W, [rosenbrock_grad(ref_W[0])])
            W, state = muon_step(W, G, h, state, QuantPolicy.disabled())
            np.testing.assert_array_equal(W, ref_W[0])

    def test_update_norm_is_eta_sqrt_rank(self, gen):
        W = gen.standard_normal((6, 4))
        new_W, _ = muon_step(W, gen.standard_normal((6, 4)), MuonHyper(eta=0.05), muon_init(W),
                             QuantPolicy.disabled())
        assert frob_norm(new_W - W) == pytest.approx(0.05 * 2.0, rel=1e-9)

    def test_zero_momentum_leaves_weights(self, gen):
        W = gen.standard_normal((3, 3))
        new_W, state = muon_step(W, np.zeros((3, 3)), MuonHyper(), muon_init(W), QuantPolicy.disabled())
        np.testing.assert_array_equal(new_W, W)
        assert state.t == 1

    def test_rejects_vectors(self):
        with pytest.raises(DimMismatch):
            muon_init([np.zeros(3)])

    def test_quantized_momentum_error(self, gen, stream):
        W = gen.standard_normal((4, 4))
        policy = QuantPolicy.uniform(6, components=["moment1"])
        _, state = muon_step(W, gen.standard_normal((4, 4)), MuonHyper(), muon_init(W), policy, stream)
        assert 0.0 <= state.qerr_m <= 2.0 ** -6


class TestWrappers:

    def test_muon_needs_aux_for_vectors(self):
        with pytest.raises(ValueError, match="auxiliary Adam"):
            QuantizedMuon(MuonHyper(), [np.zeros((2, 2)), np.zeros(2)])

    def test_muon_with_aux_matches_reference(self, gen):
        params = [gen.standard_normal((3, 4)), gen.standard_normal(4)]
        ref_params = [p.copy() for p in params]
        opt = QuantizedMuon(MuonHyper(eta=1e-2), params, AdamHyper(eta=1e-3))
        ref = ReferenceMuon(MuonHyper(eta=1e-2), AdamHyper(eta=1e-3))
        for _ in range(5):
            grads = [np.sin(p) for p in params]
            params = opt.step(params, grads, QuantPolicy.disabled(), None)
            ref.step(ref_params, [np.sin(p) for p in ref_params])
        for a, b in zip(params, ref_params):
            np.testing.assert_array_equal(a, b)
        assert opt.t == 5

    def test_adam_wrapper_reports_errors(self, gen, stream):
        params = [gen.standard_normal((3, 3))]
        opt = QuantizedAdam(AdamHyper(), params)
        opt.step(params, [np.ones((3, 3)) * 0.3], QuantPolicy.uniform(4), stream)
        assert opt.qerr_m is not None and opt.qerr_v is not None

    def test_average_blocks(self):
        avg = average_blocks([[np.ones(2), np.zeros((1, 1))], [3 * np.ones(2), np.ones((1, 1))]])
        np.testing.assert_array_equal(avg[0], [2.0, 2.0])
        np.testing.assert_array_equal(avg[1], [[0.5]])
        with pytest.raises(ValueError):
            average_blocks([])


class TestEquivalenceProbe:

    def test_average_is_scaled_sum_under_perturbations(self):
        gen = np.random.default_rng(3)
        for _ in range(100):
            beta = gen.uniform(0.05, 0.95)
            q = gen.uniform(0.0, 0.05)
            inputs = gen.standard_normal(100)
            deltas = gen.uniform(-q, q, size=100)
            a, c = adam_equivalence_probe(beta, q, inputs, deltas)
            np.testing.assert_allclose(c, (1.0 - beta) * np.asarray(a), rtol=1e-12, atol=1e-12)

    def test_default_perturbation_alternates(self):
        assert alternating_deltas(0.25, 4) == [0.25, -0.25, 0.25, -0.25]
        a, c = adam_equivalence_probe(0.9, 0.1, [1.0, 1.0])
        assert a == [1.0, pytest.approx(0.9 * 1.1 + 1.0)]

    @pytest.mark.parametrize("beta,q,deltas", [(1.0, 0.1, None), (0.9, 1.0, None), (0.9, 0.1, [0.5, 0.0])])
    def test_invalid(self, beta, q, deltas):
        with pytest.raises(ValueError):
            adam_equivalence_probe(beta, q, [1.0, 2.0], deltas)


class TestSnapshot:

    def test_adam_round_trip(self, gen, tmp_path):
        W = [gen.standard_normal((3, 2)), gen.standard_normal(2)]
        _, state = adam_step(W, [np.ones((3, 2)), np.ones(2)], AdamHyper(variant="weighted_average"),
                             adam_init(W, AdamVariant.WEIGHTED_AVERAGE), QuantPolicy.disabled())
        loaded = load_state(save_state(state, tmp_path / "adam.state"))
        assert loaded.t == 1 and loaded.variant is AdamVariant.WEIGHTED_AVERAGE
        for a, b in zip(loaded.M + loaded.V, state.M + state.V):
            np.testing.assert_array_equal(a, b)
        assert loaded.qerr_m is None

    def test_muon_round_trip(self, gen, tmp_path):
        W = gen.standard_normal((2, 3))
        _, state = muon_step(W, np.ones((2, 3)), MuonHyper(), muon_init(W), QuantPolicy.disabled())
        loaded = load_state(save_state(state, tmp_path / "muon.state"))
        assert loaded.t == 1
        np.testing.assert_array_equal(loaded.M[0], state.M[0])

    def test_truncated_payload(self, gen, tmp_path):
        W = gen.standard_normal((2, 2))
        path = save_state(adam_init(W), tmp_path / "adam.state")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError):
            load_state(path)

    def test_rejects_other_objects(self, tmp_path):
        with pytest.raises(TypeError):
            save_state(RngStream(seed=1), tmp_path / "x.state")
