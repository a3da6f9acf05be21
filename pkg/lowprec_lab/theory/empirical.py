"""
Join a training run to the bound it should satisfy.

The Adam bound controls the tau-weighted mean of ||grad F(W_t)||_F^2 with
P(tau = t) proportional to 1 - beta1^(T - t); the Muon bound controls the
plain mean of ||grad F(W_t)||_F. Both statistics are computed exactly from
the recorded history. A comparison only flags a violation when every
assumption the bound takes as input was checked against the trajectory.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, List, Optional, Union

import numpy as np

from ..errors import BoundInputMismatch
from ..optim.hyper import Schedule
from ..training.records import RunResult
from .adam_bound import AdamBoundInput, adam_bound
from .muon_bound import MuonBoundInput, muon_bound

logger = logging.getLogger(__name__)

BoundInput = Union[AdamBoundInput, MuonBoundInput]

VIOLATION_TOL = 1e-9
_CERT_TOL = 1e-12
_SETTING_RTOL = 1e-12


@dataclass(frozen=True)
class BoundConstants:
    """Problem constants read off a trajectory."""
    R: float
    L: float
    D: float
    F0_minus_Fstar: float
    G: float


@dataclass(frozen=True)
class EmpiricalComparison:
    kind: str
    empirical: float
    bound: float
    certified: bool
    violated: bool
    tight_C2: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    @property
    def slack(self) -> float:
        return self.bound - self.empirical

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "empirical": self.empirical,
            "bound": self.bound,
            "certified": self.certified,
            "violated": self.violated,
            "tight_C2": self.tight_C2,
            "notes": list(self.notes),
        }


def estimate_bound_constants(run: RunResult, epsilon: float = 1e-8,
                             f_star: Optional[float] = None) -> BoundConstants:
    """
    R from the largest stochastic-gradient entry, L from the largest
    gradient difference quotient along the trajectory, D from ||W_0||_F and
    G from the largest full-gradient norm. Without a known optimal value the
    initial suboptimality falls back to F(W_0) - F(W_T), which is only a
    lower estimate.
    """
    stats = run.stats
    f_end = stats.final_loss if f_star is None else f_star
    history = run.grad_norm_history
    return BoundConstants(
        R=stats.max_grad_inf + math.sqrt(epsilon),
        L=stats.lipschitz_estimate,
        D=stats.initial_weight_norm,
        F0_minus_Fstar=max(stats.initial_loss - f_end, 0.0),
        G=float(np.max(history)) if history.size else 0.0,
    )


def tau_weights(beta1: float, T: int) -> np.ndarray:
    """Normalised P(tau = t), t = 0 .. T-1."""
    exponents = T - np.arange(T, dtype=np.float64)
    w = -np.expm1(exponents * math.log(beta1))
    return w / np.sum(w)


def _exceeds(observed: float, bound: float) -> bool:
    return observed > bound * (1.0 + _CERT_TOL) + _CERT_TOL


def _qerr_notes(run: RunResult, p: BoundInput) -> List[str]:
    notes = []
    columns = {"q_W": "qerr_W", "q_G": "qerr_G", "q_M": "qerr_M"}
    if isinstance(p, AdamBoundInput):
        columns["q_V"] = "qerr_V"
    for name, column in columns.items():
        measured = [getattr(r, column) for r in run.records if getattr(r, column) is not None]
        if measured and _exceeds(max(measured), getattr(p, name)):
            notes.append(f"{name}={getattr(p, name)!r} below measured error {max(measured)!r}")
    return notes


def _lower_bound_notes(run: RunResult, Delta: float, L: float) -> List[str]:
    stats = run.stats
    notes = []
    if _exceeds(stats.lipschitz_estimate, L):
        notes.append(f"L={L!r} below trajectory estimate {stats.lipschitz_estimate!r}")
    if _exceeds(stats.initial_loss - stats.final_loss, Delta):
        notes.append(f"initial suboptimality {Delta!r} below observed decrease "
                     f"{stats.initial_loss - stats.final_loss!r}")
    return notes


def _check_setting(run: RunResult, key: str, expected: Any) -> None:
    actual = run.config.get(key)
    if isinstance(expected, float) and isinstance(actual, (int, float)):
        same = math.isclose(float(actual), expected, rel_tol=_SETTING_RTOL, abs_tol=0.0)
    else:
        same = actual == expected
    if not same:
        raise BoundInputMismatch(f"run has {key}={actual!r}, bound input needs {expected!r}")


def _check_common(run: RunResult, kind: str) -> None:
    _check_setting(run, "optimizer", kind)
    decay = run.config.get("weight_decay", 0.0)
    if decay:
        raise BoundInputMismatch(f"run uses weight_decay={decay!r}, the bound assumes none")


def _compare_adam(run: RunResult, p: AdamBoundInput) -> EmpiricalComparison:
    _check_common(run, "adam")
    d = sum(int(w.size) for w in run.final_params)
    if d != p.d:
        raise BoundInputMismatch(f"run has d={d} parameters, bound input says d={p.d}")
    _check_setting(run, "adam.schedule", Schedule.PAPER_OMEGA.value)
    for name in ("eta", "beta1", "beta2", "epsilon"):
        _check_setting(run, f"adam.{name}", float(getattr(p, name)))
    report = adam_bound(p)
    empirical = float(np.dot(tau_weights(p.beta1, p.T), run.grad_norm_history ** 2))

    notes = _lower_bound_notes(run, p.F0_minus_Fstar, p.L)
    if _exceeds(run.stats.max_grad_inf, p.R - math.sqrt(p.epsilon)):
        notes.append(f"R - sqrt(eps)={p.R - math.sqrt(p.epsilon)!r} below max gradient entry "
                     f"{run.stats.max_grad_inf!r}")
    if _exceeds(run.stats.initial_weight_norm, p.D):
        notes.append(f"D={p.D!r} below ||W_0||_F={run.stats.initial_weight_norm!r}")
    notes += _qerr_notes(run, p)
    return _finish("adam", empirical, report.total, notes)


def _compare_muon(run: RunResult, p: MuonBoundInput) -> EmpiricalComparison:
    _check_common(run, "muon")
    for name in ("eta", "beta"):
        _check_setting(run, f"muon.{name}", float(getattr(p, name)))
    batch = int(run.config.get("B", 1)) * int(run.config.get("batch_size", 1))
    if batch != p.B:
        raise BoundInputMismatch(f"run averages {batch} samples per step, bound input says B={p.B}")
    r = sum(min(w.shape) for w in run.final_params if w.ndim == 2)
    if r != p.r:
        raise BoundInputMismatch(f"run has r={r}, bound input says r={p.r}")
    report = muon_bound(p)
    empirical = float(np.mean(run.grad_norm_history))

    notes = _lower_bound_notes(run, p.Delta, p.L)
    noise = float(run.config.get("problem.noise_sigma", 0.0) or 0.0)
    if noise > 0.0:
        d = sum(int(w.size) for w in run.final_params)
        if _exceeds(noise * math.sqrt(d), p.sigma):
            notes.append(f"sigma={p.sigma!r} below noise level {noise * math.sqrt(d)!r}")
    if p.G is not None and run.grad_norm_history.size and _exceeds(float(np.max(run.grad_norm_history)), p.G):
        notes.append(f"G={p.G!r} below max gradient norm {float(np.max(run.grad_norm_history))!r}")
    if p.D is not None and _exceeds(run.stats.initial_weight_norm, p.D):
        notes.append(f"D={p.D!r} below ||W_0||_F={run.stats.initial_weight_norm!r}")
    notes += _qerr_notes(run, p)

    tight = None
    if report.quantization_unit > 0.0:
        rest = report.total - report.terms["quantization"]
        tight = max(0.0, (empirical - rest) / report.quantization_unit)
    return _finish("muon", empirical, report.total, notes, tight)


def _finish(kind: str, empirical: float, bound: float, notes: List[str],
            tight: Optional[float] = None) -> EmpiricalComparison:
    certified = not notes
    violated = certified and empirical > bound * (1.0 + VIOLATION_TOL)
    if violated:
        logger.warning("%s bound violated: empirical %.6g > bound %.6g", kind, empirical, bound)
    elif not certified:
        logger.info("%s comparison not certified: %s", kind, "; ".join(notes))
    return EmpiricalComparison(kind=kind, empirical=empirical, bound=bound, certified=certified,
                               violated=violated, tight_C2=tight, notes=notes)


def empirical_vs_bound(run: RunResult, bound_input: BoundInput) -> EmpiricalComparison:
    """
    Evaluate the bound for `bound_input` and the matching statistic of `run`.

    Raises:
        BoundInputMismatch: If the run and the bound input describe different
            settings: length, optimiser, step size, momentum, Adam schedule,
            dimension (Adam) or batch and rank (Muon)
        PreconditionViolated: If the bound's preconditions fail
    """
    if not isinstance(bound_input, (AdamBoundInput, MuonBoundInput)):
        raise TypeError(f"Unsupported bound input {type(bound_input).__name__}")
    if run.T != bound_input.T:
        raise BoundInputMismatch(f"run has T={run.T} iterations, bound input says T={bound_input.T}")
    if isinstance(bound_input, AdamBoundInput):
        return _compare_adam(run, bound_input)
    return _compare_muon(run, bound_input)
