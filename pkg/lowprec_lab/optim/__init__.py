"""
Quantised optimisers.

Key modules:
    - hyper: AdamHyper, MuonHyper and the step-size schedules
    - adam / muon: pure step functions over immutable state
    - reference: full-precision in-place counterparts
    - base: stateful wrappers used by the training loop
    - equivalence: weighted-sum versus weighted-average probe
    - snapshot: LPOPTST1 state files
"""

from .adam import AdamState, adam_init, adam_step
from .base import BaseOptimizer, OptimizerKind, QuantizedAdam, QuantizedMuon, make_optimizer, make_reference
from .blocks import average_blocks
from .equivalence import adam_equivalence_probe, alternating_deltas
from .hyper import AdamHyper, AdamVariant, MuonHyper, Schedule, omega
from .muon import MuonState, muon_init, muon_step, orthogonal_update
from .reference import ReferenceAdam, ReferenceMuon
from .snapshot import load_state, save_state

__all__ = [
    "AdamState",
    "adam_init",
    "adam_step",
    "BaseOptimizer",
    "OptimizerKind",
    "QuantizedAdam",
    "QuantizedMuon",
    "make_optimizer",
    "make_reference",
    "average_blocks",
    "adam_equivalence_probe",
    "alternating_deltas",
    "AdamHyper",
    "AdamVariant",
    "MuonHyper",
    "Schedule",
    "omega",
    "MuonState",
    "muon_init",
    "muon_step",
    "orthogonal_update",
    "ReferenceAdam",
    "ReferenceMuon",
    "load_state",
    "save_state",
]
