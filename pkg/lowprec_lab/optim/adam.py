"""
Quantised Adam.

The two moments are kept as weighted sums (M = beta1 M + G, V = beta2 V + G^2)
and the update is W - eta_t M / sqrt(V + epsilon). What the state stores is
the quantised moment, so every step starts from Q_M(M) and Q_V(V). The
weighted-average variant scales the new gradient by (1 - beta) and undoes
the scaling in the update.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..constants import COMPONENTS
from ..quant.fpquant import measure_rel_error_blocks, quantize_mat
from ..quant.policy import QuantPolicy
from ..quant.rng import RngStream
from .blocks import Blocks, as_blocks, check_step_inputs, unwrap
from .hyper import AdamHyper, AdamVariant

_M_INDEX = COMPONENTS.index("moment1")
_V_INDEX = COMPONENTS.index("moment2")


@dataclass(frozen=True)
class AdamState:
    """
    Optimiser state after t steps.

    M and V hold the stored (already quantised) moments, one array per
    parameter block. qerr_m / qerr_v are the relative errors measured when
    they were stored, or None when that component is not quantised.
    """
    t: int = 0
    M: List[np.ndarray] = field(default_factory=list)
    V: List[np.ndarray] = field(default_factory=list)
    variant: AdamVariant = AdamVariant.WEIGHTED_SUM
    qerr_m: Optional[float] = None
    qerr_v: Optional[float] = None

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"step counter must be >= 0, got {self.t}")
        if len(self.M) != len(self.V):
            raise ValueError(f"M has {len(self.M)} blocks but V has {len(self.V)}")


def adam_init(params: Blocks, variant: AdamVariant = AdamVariant.WEIGHTED_SUM) -> AdamState:
    blocks, _ = as_blocks(params)
    return AdamState(
        t=0,
        M=[np.zeros_like(b) for b in blocks],
        V=[np.zeros_like(b) for b in blocks],
        variant=AdamVariant(variant),
    )


def _moment_stream(rng: Optional[RngStream], component: int, block: int) -> Optional[RngStream]:
    return None if rng is None else rng.derive(component, block)


def adam_step(W: Blocks, G: Blocks, h: AdamHyper, s: AdamState, policy: QuantPolicy,
              rng: Optional[RngStream] = None) -> Tuple[Blocks, AdamState]:
    """
    One quantised Adam step.

    W and G may be single matrices or block lists of equal structure; the
    result has the same form as W. On the first step (s.t == 0) the moments
    are initialised from G alone.

    Raises:
        DimMismatch: If W, G and the state disagree on shapes
        NonFiniteGradient: If G contains NaN or infinity
        QuantizationError: If a moment cannot be quantised
    """
    W_blocks, single = as_blocks(W)
    G_blocks, _ = as_blocks(G)
    check_step_inputs(W_blocks, G_blocks, s.M)

    averaged = s.variant is AdamVariant.WEIGHTED_AVERAGE
    b1, b2, eps = h.beta1, h.beta2, h.epsilon
    eta_t = h.step_size(s.t)

    new_W, M_raw, V_raw, M_store, V_store = [], [], [], [], []
    for i, (w, g) in enumerate(zip(W_blocks, G_blocks)):
        if s.t == 0:
            M = (1.0 - b1) * g if averaged else g.copy()
            V = (1.0 - b2) * (g * g) if averaged else g * g
        elif averaged:
            M = b1 * s.M[i] + (1.0 - b1) * g
            V = b2 * s.V[i] + (1.0 - b2) * (g * g)
        else:
            M = b1 * s.M[i] + g
            V = b2 * s.V[i] + g * g

        if averaged:
            update = (M / (1.0 - b1)) / np.sqrt(V / (1.0 - b2) + eps)
        else:
            update = M / np.sqrt(V + eps)
        new_W.append(w - eta_t * update)

        M_raw.append(M)
        V_raw.append(V)
        M_store.append(quantize_mat(M, policy.moment1, _moment_stream(rng, _M_INDEX, i)))
        V_store.append(quantize_mat(V, policy.moment2, _moment_stream(rng, _V_INDEX, i)))

    state = AdamState(
        t=s.t + 1,
        M=M_store,
        V=V_store,
        variant=s.variant,
        qerr_m=measure_rel_error_blocks(M_raw, M_store) if policy.moment1.enabled else None,
        qerr_v=measure_rel_error_blocks(V_raw, V_store) if policy.moment2.enabled else None,
    )
    return unwrap(new_W, single), state
