"""
Quantised Muon.

M = beta Q_M(M) + (1 - beta) G after the first step (M = G on it), and the
weights move by -eta msign(M). Every block must be a matrix; bias vectors are
handled by the auxiliary Adam in optim.base.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..constants import COMPONENTS
from ..errors import DimMismatch
from ..linalg.densemat import frob_norm, msign
from ..quant.fpquant import measure_rel_error_blocks, quantize_mat
from ..quant.policy import QuantPolicy
from ..quant.rng import RngStream
from .blocks import Blocks, as_blocks, check_step_inputs, unwrap
from .hyper import MuonHyper

_M_INDEX = COMPONENTS.index("moment1")


@dataclass(frozen=True)
class MuonState:
    """Stored (quantised) momentum per matrix block after t steps."""
    t: int = 0
    M: List[np.ndarray] = field(default_factory=list)
    qerr_m: Optional[float] = None

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"step counter must be >= 0, got {self.t}")


def muon_init(params: Blocks) -> MuonState:
    blocks, _ = as_blocks(params)
    for i, b in enumerate(blocks):
        if b.ndim != 2:
            raise DimMismatch(f"Muon needs matrix blocks; block {i} has shape {b.shape}")
    return MuonState(t=0, M=[np.zeros_like(b) for b in blocks])


def orthogonal_update(M: np.ndarray, h: MuonHyper) -> np.ndarray:
    """msign(M) under the configured method; zero when M is zero."""
    if frob_norm(M) == 0.0:
        return np.zeros_like(M)
    return msign(M, h.ortho_method, h.ns_iters, h.ns_coeffs)


def muon_step(W: Blocks, G: Blocks, h: MuonHyper, s: MuonState, policy: QuantPolicy,
              rng: Optional[RngStream] = None) -> Tuple[Blocks, MuonState]:
    """
    One quantised Muon step.

    A zero momentum leaves that block's weights unchanged.

    Raises:
        DimMismatch: If shapes disagree or a block is not a matrix
        NonFiniteGradient: If G contains NaN or infinity
        NoConvergence: If the exact SVD hits its sweep cap
    """
    W_blocks, single = as_blocks(W)
    G_blocks, _ = as_blocks(G)
    check_step_inputs(W_blocks, G_blocks, s.M)

    new_W, M_raw, M_store = [], [], []
    for i, (w, g) in enumerate(zip(W_blocks, G_blocks)):
        if w.ndim != 2:
            raise DimMismatch(f"Muon needs matrix blocks; block {i} has shape {w.shape}")
        M = g.copy() if s.t == 0 else h.beta * s.M[i] + (1.0 - h.beta) * g
        new_W.append(w - h.eta * orthogonal_update(M, h))
        M_raw.append(M)
        M_store.append(quantize_mat(M, policy.moment1, None if rng is None else rng.derive(_M_INDEX, i)))

    state = MuonState(
        t=s.t + 1,
        M=M_store,
        qerr_m=measure_rel_error_blocks(M_raw, M_store) if policy.moment1.enabled else None,
    )
    return unwrap(new_W, single), state
