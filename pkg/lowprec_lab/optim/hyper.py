"""
Optimiser hyperparameters and step-size schedules.

Step counters are zero-based: the step taken with counter t is iteration
t + 1 of the one-based schedule, so the first step already moves.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from ..constants import NS_COEFFS
from ..linalg.densemat import OrthoMethod


class Schedule(str, Enum):
    PAPER_OMEGA = "paper_omega"
    CONSTANT = "constant"
    # Fully bias-corrected textbook Adam, expressed on the weighted-sum moments.
    STANDARD_BIAS = "standard_bias"


class AdamVariant(str, Enum):
    WEIGHTED_SUM = "weighted_sum"
    WEIGHTED_AVERAGE = "weighted_average"


def omega(beta2: float, k: int) -> float:
    """Omega_k = sqrt(sum_{j=0}^{k-1} beta2^j); Omega_0 = 0."""
    if k <= 0:
        return 0.0
    return math.sqrt(-math.expm1(k * math.log(beta2)) / (1.0 - beta2))


@dataclass(frozen=True)
class AdamHyper:
    eta: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    schedule: Schedule = Schedule.CONSTANT
    variant: AdamVariant = AdamVariant.WEIGHTED_SUM

    def __post_init__(self):
        object.__setattr__(self, "schedule", Schedule(self.schedule))
        object.__setattr__(self, "variant", AdamVariant(self.variant))
        self.validate()

    def validate(self) -> None:
        if self.eta <= 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {value}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    def step_size(self, t: int) -> float:
        """eta_t for the step taken with zero-based counter t."""
        if t < 0:
            raise ValueError(f"step counter must be >= 0, got {t}")
        if self.schedule is Schedule.CONSTANT:
            return self.eta
        k = t + 1
        base = (1.0 - self.beta1) * omega(self.beta2, k) * self.eta
        if self.schedule is Schedule.PAPER_OMEGA:
            return base
        return base / (1.0 - self.beta1 ** k)

    @property
    def step_size_limit(self) -> float:
        """Limit of the Omega schedule, (1 - beta1) eta / sqrt(1 - beta2)."""
        return (1.0 - self.beta1) * self.eta / math.sqrt(1.0 - self.beta2)


@dataclass(frozen=True)
class MuonHyper:
    eta: float = 5e-4
    beta: float = 0.9
    ortho_method: OrthoMethod = OrthoMethod.EXACT_SVD
    ns_iters: int = 10
    ns_coeffs: Tuple[float, float, float] = NS_COEFFS

    def __post_init__(self):
        object.__setattr__(self, "ortho_method", OrthoMethod(self.ortho_method))
        object.__setattr__(self, "ns_coeffs", tuple(float(c) for c in self.ns_coeffs))
        self.validate()

    def validate(self) -> None:
        if self.eta <= 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        if self.ns_iters < 0:
            raise ValueError(f"ns_iters must be >= 0, got {self.ns_iters}")
        if len(self.ns_coeffs) != 3:
            raise ValueError(f"ns_coeffs needs three values, got {self.ns_coeffs}")
