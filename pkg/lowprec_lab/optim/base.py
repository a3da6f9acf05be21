"""
Stateful optimiser wrappers driven by the training loop.

The pure step functions (adam_step, muon_step) take and return immutable
state; these classes hold that state between iterations and route vector
blocks to the auxiliary Adam when Muon trains a network with biases.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import List, Optional

import numpy as np

from ..quant.policy import QuantPolicy
from ..quant.rng import RngStream
from .adam import AdamState, adam_init, adam_step
from .hyper import AdamHyper, MuonHyper
from .muon import MuonState, muon_init, muon_step
from .reference import ReferenceAdam, ReferenceMuon

# Stream tag separating the auxiliary Adam's moment draws from Muon's.
_AUX_STREAM_TAG = 7


class OptimizerKind(str, Enum):
    ADAM = "adam"
    MUON = "muon"


class BaseOptimizer(ABC):
    """
    Interface shared by the quantised optimisers.

    step() consumes the (already quantised) gradient for the current weights
    and returns the new full-precision weights; the loop quantises them.
    """

    def __init__(self, name: str):
        self.name = name

    @property
    @abstractmethod
    def t(self) -> int:
        """Number of steps taken."""

    @abstractmethod
    def step(self, params: List[np.ndarray], grads: List[np.ndarray], policy: QuantPolicy,
             rng: Optional[RngStream]) -> List[np.ndarray]:
        """Advance one iteration."""

    @property
    def qerr_m(self) -> Optional[float]:
        return None

    @property
    def qerr_v(self) -> Optional[float]:
        return None


class QuantizedAdam(BaseOptimizer):

    def __init__(self, hyper: AdamHyper, params: List[np.ndarray]):
        super().__init__(OptimizerKind.ADAM.value)
        self.hyper = hyper
        self.state: AdamState = adam_init(params, hyper.variant)

    @property
    def t(self) -> int:
        return self.state.t

    def step(self, params, grads, policy, rng):
        new_params, self.state = adam_step(params, grads, self.hyper, self.state, policy, rng)
        return new_params

    @property
    def qerr_m(self) -> Optional[float]:
        return self.state.qerr_m

    @property
    def qerr_v(self) -> Optional[float]:
        return self.state.qerr_v


class QuantizedMuon(BaseOptimizer):
    """Muon on matrix blocks; vector blocks go to an auxiliary Adam."""

    def __init__(self, hyper: MuonHyper, params: List[np.ndarray], aux: Optional[AdamHyper] = None):
        super().__init__(OptimizerKind.MUON.value)
        self.hyper = hyper
        self.matrix_slots = [i for i, p in enumerate(params) if p.ndim == 2]
        self.vector_slots = [i for i, p in enumerate(params) if p.ndim != 2]
        if self.vector_slots and aux is None:
            raise ValueError(
                f"blocks {self.vector_slots} are not matrices; Muon needs an auxiliary Adam for them"
            )
        self.state: MuonState = muon_init([params[i] for i in self.matrix_slots])
        self.aux_hyper = aux
        self.aux_state: Optional[AdamState] = (
            adam_init([params[i] for i in self.vector_slots], aux.variant) if self.vector_slots else None
        )

    @property
    def t(self) -> int:
        return self.state.t

    def step(self, params, grads, policy, rng):
        out = list(params)
        new_mats, self.state = muon_step(
            [params[i] for i in self.matrix_slots],
            [grads[i] for i in self.matrix_slots],
            self.hyper, self.state, policy, rng,
        )
        for i, w in zip(self.matrix_slots, new_mats):
            out[i] = w

        if self.aux_state is not None:
            aux_rng = None if rng is None else rng.derive(_AUX_STREAM_TAG)
            new_vecs, self.aux_state = adam_step(
                [params[i] for i in self.vector_slots],
                [grads[i] for i in self.vector_slots],
                self.aux_hyper, self.aux_state, policy, aux_rng,
            )
            for i, w in zip(self.vector_slots, new_vecs):
                out[i] = w
        return out

    @property
    def qerr_m(self) -> Optional[float]:
        return self.state.qerr_m


def make_optimizer(kind: OptimizerKind, params: List[np.ndarray], adam: AdamHyper,
                   muon: MuonHyper, aux_adam: Optional[AdamHyper] = None) -> BaseOptimizer:
    kind = OptimizerKind(kind)
    if kind is OptimizerKind.ADAM:
        return QuantizedAdam(adam, params)
    return QuantizedMuon(muon, params, aux_adam)


def make_reference(kind: OptimizerKind, adam: AdamHyper, muon: MuonHyper,
                   aux_adam: Optional[AdamHyper] = None):
    """Full-precision counterpart of make_optimizer."""
    if OptimizerKind(kind) is OptimizerKind.ADAM:
        return ReferenceAdam(adam)
    return ReferenceMuon(muon, aux_adam)
