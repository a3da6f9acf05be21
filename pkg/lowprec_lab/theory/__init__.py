"""
Convergence bounds and their numerical certification.

Key modules:
    - adam_bound: simplified and detailed Adam bounds, schedule grid
    - muon_bound: Muon bound with the C2 quantisation block
    - lemmas: randomised checks of the supporting inequalities
    - empirical: run statistics against the bound right-hand sides
"""

from .adam_bound import (
    ADAM_TERMS,
    AdamBoundInput,
    AdamBoundReport,
    adam_bound,
    adam_bound_detailed,
    adam_preconditions,
    adam_schedule_grid,
    adam_schedule_input,
    decayed_count,
)
from .empirical import BoundConstants, EmpiricalComparison, empirical_vs_bound, estimate_bound_constants, tau_weights
from .lemmas import LEMMAS, LemmaResult, LemmaSuiteReport, check_lemma, check_lemma_suite
from .muon_bound import (
    MUON_TERMS,
    MuonBoundInput,
    MuonBoundReport,
    muon_bound,
    muon_preconditions,
    muon_schedule_grid,
    muon_schedule_input,
)

__all__ = [
    "ADAM_TERMS",
    "AdamBoundInput",
    "AdamBoundReport",
    "adam_bound",
    "adam_bound_detailed",
    "adam_preconditions",
    "adam_schedule_grid",
    "adam_schedule_input",
    "decayed_count",
    "BoundConstants",
    "EmpiricalComparison",
    "empirical_vs_bound",
    "estimate_bound_constants",
    "tau_weights",
    "LEMMAS",
    "LemmaResult",
    "LemmaSuiteReport",
    "check_lemma",
    "check_lemma_suite",
    "MUON_TERMS",
    "MuonBoundInput",
    "MuonBoundReport",
    "muon_bound",
    "muon_preconditions",
    "muon_schedule_grid",
    "muon_schedule_input",
]
