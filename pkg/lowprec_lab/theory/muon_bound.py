"""
Convergence bound of quantised Muon on the average expected gradient norm.

The displayed form collects the quantisation contributions into
C2 * (q_G + q_W + q_G T eta + q_W T eta + q_M beta / (1 - beta (1 + q_M)) (1 + T eta))
with an unspecified absolute constant C2. When a gradient bound G and an
initial weight bound D are supplied, the fully explicit quantisation block
is evaluated as well.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from ..errors import PreconditionViolated

PRE_MOMENTUM = "β(1+q_M) < 1"

MUON_TERMS = ("initial", "momentum", "noise_transient", "noise_stationary", "smoothness", "quantization")


@dataclass(frozen=True)
class MuonBoundInput:
    """
    r = min(m, n); B is the minibatch size; sigma bounds the gradient noise
    in Frobenius norm; Delta bounds F(W_0) - F*.
    """
    T: int
    eta: float
    beta: float = 0.9
    r: int = 1
    B: int = 1
    sigma: float = 0.0
    L: float = 1.0
    Delta: float = 1.0
    q_G: float = 0.0
    q_W: float = 0.0
    q_M: float = 0.0
    C2: float = 1.0
    G: Optional[float] = None
    D: Optional[float] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.T < 1 or self.r < 1 or self.B < 1:
            raise ValueError(f"T, r and B must be positive, got T={self.T}, r={self.r}, B={self.B}")
        if self.eta <= 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        for name in ("q_G", "q_W", "q_M"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {getattr(self, name)}")
        for name in ("sigma", "L", "Delta", "C2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("G", "D"):
            value = getattr(self, name)
            if value is not None and value < 0.0:
                raise ValueError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class MuonBoundReport:
    total: float
    terms: Dict[str, float]
    quantization_unit: float
    explicit_quantization: Optional[float] = None

    @property
    def explicit_total(self) -> Optional[float]:
        """Bound with the explicit quantisation block in place of the C2 form."""
        if self.explicit_quantization is None:
            return None
        return self.total - self.terms["quantization"] + self.explicit_quantization

    def as_dict(self) -> Dict[str, float]:
        flat = {"total": self.total, "quantization_unit": self.quantization_unit}
        flat.update({f"terms.{k}": v for k, v in self.terms.items()})
        if self.explicit_quantization is not None:
            flat["explicit_quantization"] = self.explicit_quantization
            flat["explicit_total"] = self.explicit_total
        return dict(sorted(flat.items()))


def muon_preconditions(p: MuonBoundInput) -> List[str]:
    return [] if p.beta * (1.0 + p.q_M) < 1.0 else [PRE_MOMENTUM]


def _explicit_block(p: MuonBoundInput) -> float:
    root_r = math.sqrt(p.r)
    Teta = p.T * p.eta
    noise = p.sigma / math.sqrt(p.B)
    shrink = math.sqrt((1.0 - p.beta) / (1.0 + p.beta))
    qg1 = 1.0 + p.q_G
    momentum = 2.0 * p.q_M * p.beta * root_r / (1.0 - p.beta * (1.0 + p.q_M)) * (
        noise + shrink * noise + p.G + p.q_G * (p.sigma + p.G) + p.q_W * qg1 * p.D * p.L
        + (1.0 + p.q_W) * qg1 * Teta * root_r * p.L
    )
    return (
        6.0 * p.q_G * root_r * (p.sigma + p.G)
        + 6.0 * p.q_G * Teta * p.r * p.L
        + 2.0 * p.q_W * qg1 * p.D * p.L * root_r
        + 2.0 * p.q_W * qg1 * Teta * p.r * p.L
        + momentum
    )


def muon_bound(p: MuonBoundInput) -> MuonBoundReport:
    """
    Term-by-term evaluation.

    Raises:
        PreconditionViolated: If beta (1 + q_M) >= 1
    """
    violated = muon_preconditions(p)
    if violated:
        raise PreconditionViolated(violated)

    Teta = p.T * p.eta
    root_r = math.sqrt(p.r)
    unit = (
        p.q_G + p.q_W + p.q_G * Teta + p.q_W * Teta
        + p.q_M * p.beta / (1.0 - p.beta * (1.0 + p.q_M)) * (1.0 + Teta)
    )
    terms = {
        "initial": p.Delta / (p.eta * p.T),
        "momentum": 2.0 * p.beta * p.L * p.eta * p.r / (1.0 - p.beta),
        "noise_transient": 6.0 * p.sigma * root_r / (p.T * (1.0 - p.beta) * math.sqrt(p.B)),
        "noise_stationary": math.sqrt((1.0 - p.beta) / (1.0 + p.beta)) * 6.0 * p.sigma * root_r / math.sqrt(p.B),
        "smoothness": p.L * p.eta * p.r / 2.0,
        "quantization": p.C2 * unit,
    }
    explicit = _explicit_block(p) if p.G is not None and p.D is not None else None
    return MuonBoundReport(
        total=math.fsum(terms.values()),
        terms=terms,
        quantization_unit=unit,
        explicit_quantization=explicit,
    )


def muon_schedule_input(T: int, base: MuonBoundInput) -> MuonBoundInput:
    """
    `base` moved onto the rate schedule: 1 - beta = T^-1/2, eta = T^-3/4,
    B = 1, q_G = q_W = T^-1/2 and q_M = 1/T.
    """
    return MuonBoundInput(
        T=T, eta=T ** -0.75, beta=1.0 - T ** -0.5, r=base.r, B=1, sigma=base.sigma, L=base.L,
        Delta=base.Delta, q_G=T ** -0.5, q_W=T ** -0.5, q_M=1.0 / T, C2=base.C2, G=base.G, D=base.D,
    )


def muon_schedule_grid(Ts: Sequence[int], base: MuonBoundInput) -> List[Dict[str, float]]:
    """Rows (T, total, total T^(1/4)) of the bound along the schedule."""
    rows = []
    for T in Ts:
        total = muon_bound(muon_schedule_input(T, base)).total
        rows.append({"T": T, "total": total, "normalized": total * T ** 0.25})
    return rows
