"""
Master/worker quantised training loop.

Per iteration t:
    1. the master quantises its full-precision weights, W^Q = Q_W(W_t)
    2. each of the B workers draws a stochastic gradient at W^Q and sends Q_G of it
    3. the master averages the B quantised gradients in worker order
    4. the optimiser steps (storing Q_M / Q_V moments internally)
    5. a telemetry row is kept every `telemetry_every` iterations

Workers may run on a thread pool; results are consumed in worker order, so
the outcome does not depend on scheduling.
"""

import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import COMPONENTS
from ..errors import TrainingError
from ..optim.base import make_optimizer, make_reference
from ..optim.blocks import average_blocks
from ..problems.base import BaseObjective, Params, blocks_inf_norm, blocks_norm
from ..problems.oracle import make_objective
from ..quant.fpquant import QuantSpec, measure_rel_error_blocks, quantize_mat
from ..quant.policy import QuantPolicy
from ..quant.rng import RngStream, component_stream
from .config import TrainConfig
from .records import RunResult, TrainRecord, TrajectoryStats, checksum, tail_mean

logger = logging.getLogger(__name__)

_W_INDEX = COMPONENTS.index("weights")
_G_INDEX = COMPONENTS.index("gradients")
# Stream tags for draws that are not quantiser noise.
ORACLE_STREAM = len(COMPONENTS)
OPTIMIZER_STREAM = len(COMPONENTS) + 1


def oracle_stream(seed: int, worker: int, t: int) -> RngStream:
    return component_stream(seed, ORACLE_STREAM, worker, t)


def optimizer_stream(seed: int, t: int) -> RngStream:
    return component_stream(seed, OPTIMIZER_STREAM, 0, t)


def quantize_blocks(blocks: Sequence[np.ndarray], spec: QuantSpec, rng: RngStream) -> List[np.ndarray]:
    """Quantise each block with its own child stream."""
    return [quantize_mat(b, spec, rng.derive(i)) for i, b in enumerate(blocks)]


class _Worker:
    """Simulated worker: one stochastic gradient, quantised for the wire."""

    def __init__(self, objective: BaseObjective, cfg: TrainConfig):
        self.objective = objective
        self.cfg = cfg

    def __call__(self, job: Tuple[int, int, Params]) -> Tuple[Params, Params]:
        worker, t, weights = job
        sample = self.objective.sample_grad(weights, oracle_stream(self.cfg.seed, worker, t),
                                            self.cfg.batch_size)
        sent = quantize_blocks(sample.grad, self.cfg.policy.gradients,
                               component_stream(self.cfg.seed, _G_INDEX, worker, t))
        return sample.grad, sent


class _Tracker:
    """Collects the per-iteration history and the trajectory statistics."""

    def __init__(self, cfg: TrainConfig, objective: BaseObjective, params: Params):
        self.cfg = cfg
        self.objective = objective
        self.records: List[TrainRecord] = []
        self.grad_norms = np.zeros(cfg.T)
        self.max_grad_inf = 0.0
        self.lipschitz = 0.0
        self.max_weight_norm = blocks_norm(params)
        self.initial_weight_norm = self.max_weight_norm
        self.initial_loss = 0.0
        self.initial_grad_norm = 0.0
        self._prev: Optional[Tuple[Params, Params]] = None

    def observe(self, t: int, params: Params) -> Tuple[float, float]:
        """Loss and true gradient norm at W_t."""
        loss = self.objective.value(params)
        grad = self.objective.full_grad(params)
        norm = blocks_norm(grad)
        self.grad_norms[t] = norm
        self.max_weight_norm = max(self.max_weight_norm, blocks_norm(params))
        if self._prev is not None:
            prev_w, prev_g = self._prev
            dw = blocks_norm([a - b for a, b in zip(params, prev_w)])
            if dw > 0.0:
                dg = blocks_norm([a - b for a, b in zip(grad, prev_g)])
                self.lipschitz = max(self.lipschitz, dg / dw)
        else:
            self.initial_loss, self.initial_grad_norm = loss, norm
        self._prev = ([p.copy() for p in params], grad)
        return loss, norm

    def observe_samples(self, raw: Sequence[Params]) -> None:
        for grad in raw:
            self.max_grad_inf = max(self.max_grad_inf, blocks_inf_norm(grad))

    def result(self, params: Params) -> RunResult:
        return RunResult(
            records=self.records,
            checksum=checksum(params),
            tail_grad_norm=tail_mean(self.grad_norms, self.cfg.tail_window),
            config=self.cfg.echo(),
            grad_norm_history=self.grad_norms,
            final_params=params,
            stats=TrajectoryStats(
                max_grad_inf=self.max_grad_inf,
                lipschitz_estimate=self.lipschitz,
                initial_weight_norm=self.initial_weight_norm,
                initial_grad_norm=self.initial_grad_norm,
                initial_loss=self.initial_loss,
                final_loss=self.objective.value(params),
                max_weight_norm=max(self.max_weight_norm, blocks_norm(params)),
            ),
        )


def _pool(cfg: TrainConfig):
    if cfg.workers > 1 and cfg.B > 1:
        return ThreadPoolExecutor(max_workers=min(cfg.workers, cfg.B), thread_name_prefix="worker")
    return nullcontext(None)


def _gather(pool: Optional[Executor], worker: _Worker, t: int, weights: Params) -> List[Tuple[Params, Params]]:
    jobs = [(i, t, weights) for i in range(worker.cfg.B)]
    if pool is None:
        return [worker(job) for job in jobs]
    return list(pool.map(worker, jobs))


def _pooled_error(policy_spec: QuantSpec, raw: Sequence[np.ndarray], stored: Sequence[np.ndarray]) -> Optional[float]:
    return measure_rel_error_blocks(raw, stored) if policy_spec.enabled else None


def _decay(cfg: TrainConfig, new_params: Params, params: Params) -> Params:
    if cfg.weight_decay == 0.0:
        return new_params
    shrink = cfg.eta * cfg.weight_decay
    return [w - shrink * p for w, p in zip(new_params, params)]


def run_training(cfg: TrainConfig) -> RunResult:
    """
    Run cfg.T iterations of quantised training.

    Raises:
        TrainingError: Wrapping any error raised inside an iteration; the
            original exception is chained as __cause__
    """
    objective = make_objective(cfg.problem)
    params = [p.astype(np.float64, copy=True) for p in objective.init_params()]
    optimizer = make_optimizer(cfg.optimizer, params, cfg.adam, cfg.muon, cfg.effective_aux_adam)
    worker = _Worker(objective, cfg)
    tracker = _Tracker(cfg, objective, params)
    policy: QuantPolicy = cfg.policy

    logger.info("Starting %s on %s: T=%d, B=%d, q=%s", cfg.optimizer.value, cfg.problem.kind.value,
                cfg.T, cfg.B, policy.bounds())
    with _pool(cfg) as pool:
        for t in range(cfg.T):
            started = time.perf_counter_ns() if cfg.record_wall_time else 0
            try:
                loss, grad_norm = tracker.observe(t, params)
                weights_q = quantize_blocks(params, policy.weights,
                                            component_stream(cfg.seed, _W_INDEX, 0, t))
                replies = _gather(pool, worker, t, weights_q)
                raw = [r for r, _ in replies]
                sent = [s for _, s in replies]
                tracker.observe_samples(raw)
                g_hat = average_blocks(sent)
                new_params = optimizer.step(params, g_hat, policy, optimizer_stream(cfg.seed, t))
                new_params = _decay(cfg, new_params, params)
            except Exception as e:
                raise TrainingError(t, e) from e

            if t % cfg.telemetry_every == 0:
                record = TrainRecord(
                    t=t,
                    loss=loss,
                    grad_norm_F=grad_norm,
                    qerr_W=_pooled_error(policy.weights, params, weights_q),
                    qerr_G=_pooled_error(policy.gradients, [g for r in raw for g in r],
                                         [g for s in sent for g in s]),
                    qerr_M=optimizer.qerr_m,
                    qerr_V=optimizer.qerr_v,
                    update_norm_F=blocks_norm([a - b for a, b in zip(new_params, params)]),
                    wall_ns=time.perf_counter_ns() - started if cfg.record_wall_time else None,
                )
                tracker.records.append(record)
                logger.debug("t=%d loss=%.6g grad_norm=%.6g", t, loss, grad_norm)
            params = new_params

    result = tracker.result(params)
    logger.info("Finished: tail_grad_norm=%.6g final_loss=%.6g", result.tail_grad_norm,
                result.stats.final_loss)
    return result


def run_reference_training(cfg: TrainConfig) -> RunResult:
    """
    The same loop with the full-precision reference optimiser and no
    quantisation anywhere; cfg.policy is ignored.
    """
    cfg = replace(cfg, policy=QuantPolicy.disabled())
    objective = make_objective(cfg.problem)
    params = [p.astype(np.float64, copy=True) for p in objective.init_params()]
    reference = make_reference(cfg.optimizer, cfg.adam, cfg.muon, cfg.effective_aux_adam)
    tracker = _Tracker(cfg, objective, params)

    for t in range(cfg.T):
        loss, grad_norm = tracker.observe(t, params)
        samples = [objective.sample_grad(params, oracle_stream(cfg.seed, i, t), cfg.batch_size).grad
                   for i in range(cfg.B)]
        tracker.observe_samples(samples)
        before = [p.copy() for p in params]
        reference.step(params, average_blocks(samples))
        params = _decay(cfg, params, before)
        if t % cfg.telemetry_every == 0:
            tracker.records.append(TrainRecord(
                t=t, loss=loss, grad_norm_F=grad_norm,
                update_norm_F=blocks_norm([a - b for a, b in zip(params, before)]),
            ))
    return tracker.result(params)


def sweep(cfg_base: TrainConfig, mantissa_list: Sequence[int],
          components: Optional[Sequence[str]] = None, max_workers: int = 1) -> List[RunResult]:
    """
    One run per mantissa length, quantising `components` (default all).

    With max_workers > 1 the runs go to a process pool; results always
    follow the order of mantissa_list.
    """
    if not mantissa_list:
        raise ValueError("mantissa_list must not be empty")
    configs = [cfg_base.with_mantissa(M, components) for M in mantissa_list]
    for M in mantissa_list:
        logger.info("Sweep point M=%d (%s)", M, ",".join(components) if components else "all components")
    if max_workers <= 1 or len(configs) == 1:
        return [run_training(c) for c in configs]
    with ProcessPoolExecutor(max_workers=min(max_workers, len(configs))) as pool:
        return list(pool.map(run_training, configs))
