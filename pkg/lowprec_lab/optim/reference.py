"""
Full-precision reference optimisers.

Plain in-place implementations with no quantisation hooks. With every
quantiser disabled, adam_step / muon_step must reproduce these trajectories
bit for bit, so the floating-point operation order here is part of the
contract.
"""

from typing import List, Optional, Sequence

import numpy as np

from .hyper import AdamHyper, AdamVariant, MuonHyper
from .muon import orthogonal_update


class ReferenceAdam:
    """Adam over a list of blocks, updating the caller's arrays in place."""

    def __init__(self, hyper: AdamHyper):
        self.hyper = hyper
        self.m: List[np.ndarray] = []
        self.v: List[np.ndarray] = []
        self.t = 0

    def step(self, params: List[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        h = self.hyper
        averaged = h.variant is AdamVariant.WEIGHTED_AVERAGE
        eta_t = h.step_size(self.t)

        for k, g in enumerate(grads):
            if self.t == 0:
                self.m.append((1.0 - h.beta1) * g if averaged else g.copy())
                self.v.append((1.0 - h.beta2) * (g * g) if averaged else g * g)
            else:
                self.m[k] *= h.beta1
                self.m[k] += (1.0 - h.beta1) * g if averaged else g
                self.v[k] *= h.beta2
                self.v[k] += (1.0 - h.beta2) * (g * g) if averaged else g * g

            if averaged:
                denom = np.sqrt(self.v[k] / (1.0 - h.beta2) + h.epsilon)
                params[k] -= eta_t * ((self.m[k] / (1.0 - h.beta1)) / denom)
            else:
                params[k] -= eta_t * (self.m[k] / np.sqrt(self.v[k] + h.epsilon))

        self.t += 1


class ReferenceMuon:
    """
    Muon on matrix blocks, with an optional Adam for vector blocks.

    Without `aux` every block must be a matrix.
    """

    def __init__(self, hyper: MuonHyper, aux: Optional[AdamHyper] = None):
        self.hyper = hyper
        self.aux = ReferenceAdam(aux) if aux is not None else None
        self.m: List[np.ndarray] = []
        self.t = 0

    def step(self, params: List[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        h = self.hyper
        matrices = [k for k, p in enumerate(params) if p.ndim == 2]
        vectors = [k for k, p in enumerate(params) if p.ndim != 2]
        if vectors and self.aux is None:
            raise ValueError(f"blocks {vectors} are not matrices and no auxiliary Adam is configured")

        for slot, k in enumerate(matrices):
            g = grads[k]
            if self.t == 0:
                self.m.append(g.copy())
            else:
                self.m[slot] *= h.beta
                self.m[slot] += (1.0 - h.beta) * g
            params[k] -= h.eta * orthogonal_update(self.m[slot], h)

        if vectors:
            sub = [params[k] for k in vectors]
            self.aux.step(sub, [grads[k] for k in vectors])

        self.t += 1
