"""
Convergence bound of quantised Adam.

adam_bound evaluates the simplified bound on the tau-weighted expected
squared gradient norm; adam_bound_detailed evaluates the sharper form it is
derived from (with T~ = T - beta1 / (1 - beta1)). Both take the quantisation
bounds q_W, q_G, q_M, q_V as inputs and raise PreconditionViolated naming
every failed condition.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from ..errors import PreconditionViolated

PRE_SECOND_MOMENT = "β1²(1+q_M)² < β2(1−q_V)"
PRE_FIRST_MOMENT = "β1(1+q_M) < β2(1−q_V)"
PRE_HORIZON = "2β1/(1−β1) ≤ T"

ADAM_TERMS = ("initial", "log_term_C", "Qtilde_over_T", "wg_term", "weight_growth_term")


@dataclass(frozen=True)
class AdamBoundInput:
    """
    Problem, optimiser and quantisation parameters of the Adam bound.

    d is the number of trainable scalars, R bounds the stochastic gradient
    entrywise by R - sqrt(epsilon), L is the smoothness constant, D bounds
    the initial weight norm and F0_minus_Fstar the initial suboptimality.
    """
    T: int
    d: int
    eta: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    q_G: float = 0.0
    q_M: float = 0.0
    q_V: float = 0.0
    q_W: float = 0.0
    R: float = 1.0
    L: float = 1.0
    D: float = 1.0
    F0_minus_Fstar: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.T < 1 or self.d < 1:
            raise ValueError(f"T and d must be positive, got T={self.T}, d={self.d}")
        if self.eta <= 0.0 or self.epsilon <= 0.0:
            raise ValueError(f"eta and epsilon must be positive, got {self.eta}, {self.epsilon}")
        for name in ("beta1", "beta2"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {getattr(self, name)}")
        for name in ("q_G", "q_M", "q_V", "q_W"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {getattr(self, name)}")
        for name in ("R", "L", "D", "F0_minus_Fstar"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def r_prime(self) -> float:
        return self.beta1 ** 2 * (1.0 + self.q_M) ** 2 / (self.beta2 * (1.0 - self.q_V))


@dataclass(frozen=True)
class AdamBoundReport:
    total: float
    terms: Dict[str, float]
    r_prime: float
    C: float
    Qtilde: float
    constants: Dict[str, float] = field(default_factory=dict)

    @property
    def grad_norm_bound(self) -> float:
        """Bound on E||grad F||_F by Jensen, sqrt(total)."""
        return math.sqrt(self.total)

    def as_dict(self) -> Dict[str, float]:
        flat = {"total": self.total, "r_prime": self.r_prime, "C": self.C, "Qtilde": self.Qtilde,
                "grad_norm_bound": self.grad_norm_bound}
        flat.update({f"terms.{k}": v for k, v in self.terms.items()})
        flat.update({f"constants.{k}": v for k, v in self.constants.items()})
        return dict(sorted(flat.items()))


def adam_preconditions(p: AdamBoundInput) -> List[str]:
    """Names of the violated preconditions, in check order."""
    damped = p.beta2 * (1.0 - p.q_V)
    violated = []
    if not p.beta1 ** 2 * (1.0 + p.q_M) ** 2 < damped:
        violated.append(PRE_SECOND_MOMENT)
    if not p.beta1 * (1.0 + p.q_M) < damped:
        violated.append(PRE_FIRST_MOMENT)
    if not 2.0 * p.beta1 / (1.0 - p.beta1) <= p.T:
        violated.append(PRE_HORIZON)
    return violated


def _check(p: AdamBoundInput) -> None:
    violated = adam_preconditions(p)
    if violated:
        raise PreconditionViolated(violated)


def decayed_count(q_V: float, T: int) -> float:
    """(1 - q_V)/q_V (1 - (1 - q_V)^T), with its limit T at q_V = 0."""
    if q_V == 0.0:
        return float(T)
    return (1.0 - q_V) / q_V * -math.expm1(T * math.log1p(-q_V))


def _log_term(p: AdamBoundInput, decay: float) -> float:
    grad = ((1.0 + p.q_G) * p.R) ** 2
    return math.log1p(grad / (p.epsilon * (1.0 - decay))) - p.T * math.log(decay)


def _momentum_denominator(p: AdamBoundInput) -> float:
    lead = p.beta1 * (1.0 + p.q_M)
    return (1.0 - lead) * (1.0 - lead / (p.beta2 * (1.0 - p.q_V)))


def _quantized_momentum_ratio(p: AdamBoundInput) -> float:
    r = p.r_prime
    return math.sqrt(r * (1.0 + r)) / ((1.0 + p.q_M) * (1.0 - r) ** 1.5)


def _q_part(p: AdamBoundInput, scale: float) -> float:
    """Q~(T) for scale 4, the detailed Q(T) for scale 2."""
    b1, b2 = p.beta1, p.beta2
    lead = scale * (1.0 + p.q_G) * p.d * p.R ** 2 * (1.0 - b1)
    momentum = lead * p.q_M * p.T / math.sqrt(1.0 - b2) * _quantized_momentum_ratio(p)
    K = lead / math.sqrt((1.0 - b1 ** 2 / (b2 * (1.0 - p.q_V))) * (1.0 - b2))
    return momentum + K * p.T - K * decayed_count(p.q_V, p.T)


def _weight_terms(p: AdamBoundInput) -> Dict[str, float]:
    qg1 = 1.0 + p.q_G
    wg = 4.0 * qg1 * p.d / math.sqrt(p.epsilon * (1.0 - p.beta2)) * (
        p.q_G * p.R ** 3 + p.L * p.q_W * p.R ** 2 * p.D
    )
    growth = (
        2.0 * (1.0 - p.beta1) * p.d ** 1.5 * p.eta * p.L * p.q_W * qg1 * p.R ** 2 * p.T
        / (math.sqrt(p.epsilon) * (1.0 - p.beta2) * math.sqrt(1.0 - p.r_prime))
    )
    return {"wg_term": wg, "weight_growth_term": growth}


def adam_bound(p: AdamBoundInput) -> AdamBoundReport:
    """
    Simplified bound, term by term.

    Raises:
        PreconditionViolated: Listing every failed precondition by name
    """
    _check(p)
    b1, b2 = p.beta1, p.beta2
    qg1 = 1.0 + p.q_G
    denom = _momentum_denominator(p)

    C = (
        24.0 * p.d * (qg1 * p.R) ** 2 * math.sqrt(1.0 - b1)
        / ((1.0 - b1 / b2) ** 1.5 * math.sqrt(1.0 - b2))
        + 2.0 * p.d * p.eta * p.L * qg1 * p.R * (1.0 - b1) ** 2 / (denom * (1.0 - b2))
        + 4.0 * p.d * p.eta ** 2 * p.L ** 2 * b1 * (1.0 - b1) / (denom * (1.0 - b2) ** 1.5)
    )
    Qtilde = _q_part(p, 4.0)

    terms = {
        "initial": 4.0 * qg1 * p.R * p.F0_minus_Fstar / (p.eta * p.T),
        "log_term_C": C / p.T * _log_term(p, b2 * (1.0 - p.q_V)),
        "Qtilde_over_T": Qtilde / p.T,
    }
    terms.update(_weight_terms(p))
    return AdamBoundReport(
        total=math.fsum(terms.values()),
        terms=terms,
        r_prime=p.r_prime,
        C=C,
        Qtilde=Qtilde,
    )


def adam_bound_detailed(p: AdamBoundInput) -> AdamBoundReport:
    """
    The unsimplified bound with constants E, H and Q(T).

    It never exceeds the simplified one when q_V = 0 and T >= 2 beta1 / (1 - beta1).
    """
    _check(p)
    b1, b2 = p.beta1, p.beta2
    qg1 = 1.0 + p.q_G
    T_eff = p.T - b1 / (1.0 - b1)
    denom = _momentum_denominator(p)

    E = 12.0 * p.d * (qg1 * p.R) ** 2 * math.sqrt(1.0 - b1) / ((1.0 - b1 / b2) ** 1.5 * math.sqrt(1.0 - b2))
    H = (
        p.d * p.eta * p.L * qg1 * p.R * (1.0 - b1) ** 2 / (denom * (1.0 - b2))
        + 2.0 * p.d * p.eta ** 2 * p.L ** 2 * b1 * (1.0 - b1) / (denom * (1.0 - b2) ** 1.5)
    )
    Q = _q_part(p, 2.0)
    weights = _weight_terms(p)

    terms = {
        "initial": 2.0 * qg1 * p.R * p.F0_minus_Fstar / (p.eta * T_eff),
        "log_term_E": E / T_eff * _log_term(p, b2),
        "log_term_H": H / T_eff * _log_term(p, b2 * (1.0 - p.q_V)),
        "Q_over_T": Q / T_eff,
        # detailed weight terms are the simplified ones scaled by T / (2 T~)
        "wg_term": weights["wg_term"] * p.T / (2.0 * T_eff),
        "weight_growth_term": weights["weight_growth_term"] * p.T / (2.0 * T_eff),
    }
    return AdamBoundReport(
        total=math.fsum(terms.values()),
        terms=terms,
        r_prime=p.r_prime,
        C=2.0 * (E + H),
        Qtilde=Q,
        constants={"E": E, "H": H, "T_eff": T_eff},
    )


def adam_schedule_input(T: int, base: AdamBoundInput) -> AdamBoundInput:
    """
    `base` moved onto the rate schedule: eta = T^-1/2, 1 - beta2 = 1/T,
    q_G = q_M = 1/T and q_V = q_W = 1/T^2.
    """
    return AdamBoundInput(
        T=T, d=base.d, eta=T ** -0.5, beta1=base.beta1, beta2=1.0 - 1.0 / T, epsilon=base.epsilon,
        q_G=1.0 / T, q_M=1.0 / T, q_V=1.0 / T ** 2, q_W=1.0 / T ** 2,
        R=base.R, L=base.L, D=base.D, F0_minus_Fstar=base.F0_minus_Fstar,
    )


def adam_schedule_grid(Ts: Sequence[int], base: AdamBoundInput) -> List[Dict[str, float]]:
    """Rows (T, total, total sqrt(T) / ln T) of the bound along the schedule."""
    rows = []
    for T in Ts:
        total = adam_bound(adam_schedule_input(T, base)).total
        rows.append({"T": T, "total": total, "normalized": total * math.sqrt(T) / math.log(T)})
    return rows
