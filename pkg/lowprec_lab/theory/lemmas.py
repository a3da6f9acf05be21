"""
Numerical certification of the inequalities the convergence bounds rest on.

Each checker draws one random instance inside the inequality's hypotheses
and returns (lhs, rhs, witness). The suite counts an instance as violated
when lhs > rhs (1 + 1e-12) and records the largest lhs / rhs ratio seen.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import LemmaViolated
from ..linalg.densemat import OrthoMethod, elementwise_map, frob_norm, msign
from ..quant.fpquant import QuantSpec, Rounding, quantize_mat
from ..quant.rng import RngStream

logger = logging.getLogger(__name__)

REL_TOL = 1e-12

Instance = Tuple[float, float, Dict[str, Any]]


@dataclass
class LemmaResult:
    name: str
    trials: int = 0
    max_ratio: float = 0.0
    violations: int = 0
    witness: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, lhs: float, rhs: float, witness: Dict[str, Any]) -> None:
        self.trials += 1
        if rhs > 0.0:
            ratio = lhs / rhs
        else:
            ratio = 0.0 if lhs <= 0.0 else math.inf
        self.max_ratio = max(self.max_ratio, ratio)
        if lhs > rhs * (1.0 + REL_TOL):
            self.violations += 1
            if self.witness is None:
                self.witness = {**witness, "lhs": lhs, "rhs": rhs}


@dataclass
class LemmaSuiteReport:
    seed: int
    trials: int
    results: List[LemmaResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def violations(self) -> int:
        return sum(r.violations for r in self.results)

    def result(self, name: str) -> LemmaResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(f"Unknown lemma '{name}'. Must be one of: {[r.name for r in self.results]}")

    def raise_for_violations(self) -> None:
        for r in self.results:
            if not r.passed:
                raise LemmaViolated(r.name, r.witness)


def _log_uniform(gen: np.random.Generator, lo: float, hi: float) -> float:
    return float(10.0 ** gen.uniform(math.log10(lo), math.log10(hi)))


def adaptive_ratio_sum(gen: np.random.Generator, trial: int) -> Instance:
    """sum_j c_j^2 / (eps + b_j) <= (ln(1 + b_n / eps) - n ln beta2) / ((1 - beta1)(1 - beta1 / beta2))."""
    beta2 = gen.uniform(0.5, 1.0)
    beta1 = gen.uniform(0.0, beta2)
    eps = _log_uniform(gen, 1e-8, 1.0)
    n = int(gen.integers(1, 200))
    a = gen.standard_normal(n) * _log_uniform(gen, 1e-3, 1e2)

    b = c = lhs = 0.0
    for a_j in a.tolist():
        b = beta2 * b + a_j * a_j
        c = beta1 * c + a_j
        lhs += c * c / (eps + b)
    rhs = (math.log1p(b / eps) - n * math.log(beta2)) / ((1.0 - beta1) * (1.0 - beta1 / beta2))
    return lhs, rhs, {"beta1": beta1, "beta2": beta2, "eps": eps, "n": n}


def _sample_rho(gen: np.random.Generator) -> Tuple[float, int]:
    rho = 1.0 - _log_uniform(gen, 1e-3, 1.0) if gen.random() < 0.5 else gen.uniform(0.0, 1.0)
    return min(max(rho, 1e-9), 1.0 - 1e-9), int(gen.integers(1, 5000))


def geometric_sqrt_sum(gen: np.random.Generator, trial: int) -> Instance:
    """sum_{k<K} rho^k sqrt(k + 1) <= 2 / (1 - rho)^(3/2)."""
    rho, K = _sample_rho(gen)
    k = np.arange(K, dtype=np.float64)
    lhs = float(np.sum(rho ** k * np.sqrt(k + 1.0)))
    return lhs, 2.0 / (1.0 - rho) ** 1.5, {"rho": rho, "K": K}


def geometric_sqrt_linear_sum(gen: np.random.Generator, trial: int) -> Instance:
    """sum_{k<K} rho^k sqrt(k) (k + 1) <= 4 rho / (1 - rho)^(5/2)."""
    rho, K = _sample_rho(gen)
    k = np.arange(K, dtype=np.float64)
    lhs = float(np.sum(rho ** k * np.sqrt(k) * (k + 1.0)))
    return lhs, 4.0 * rho / (1.0 - rho) ** 2.5, {"rho": rho, "K": K}


def _random_sequence(gen: np.random.Generator, length: int) -> np.ndarray:
    g = gen.standard_normal(length) * _log_uniform(gen, 1e-3, 1e3)
    g[gen.random(length) < 0.1] = 0.0
    g[0] = g[0] if g[0] != 0.0 else 1.0
    return g


def finite_cauchy(gen: np.random.Generator, trial: int) -> Instance:
    """sum a^k |g_k| / sqrt(sum b^k g_k^2) <= sqrt(1 / (1 - a^2 / b)) for a^2 < b."""
    b = gen.uniform(0.05, 1.0)
    a = gen.uniform(0.0, 0.999) * math.sqrt(b)
    t = int(gen.integers(1, 300))
    g = _random_sequence(gen, t)
    k = np.arange(t, dtype=np.float64)
    lhs = float(np.sum(a ** k * np.abs(g)) / math.sqrt(np.sum(b ** k * g * g)))
    return lhs, math.sqrt(1.0 / (1.0 - a * a / b)), {"a": a, "b": b, "t": t}


def refined_cauchy(gen: np.random.Generator, trial: int) -> Instance:
    """
    With A_k = beta1^k ((1 + q_M)^k - 1) and B_k = (beta2 (1 - q_V))^k:
    sum A_k |g_k| / sqrt(sum B_k g_k^2) <= q_M sqrt(r'(1 + r')) / ((1 + q_M)(1 - r')^(3/2)).
    """
    beta2 = gen.uniform(0.5, 1.0)
    q_V = gen.uniform(0.0, 0.1)
    q_M = 0.0 if gen.random() < 0.1 else gen.uniform(0.0, 0.5)
    beta1 = gen.uniform(0.0, 0.999) * math.sqrt(beta2 * (1.0 - q_V)) / (1.0 + q_M)
    r = beta1 ** 2 * (1.0 + q_M) ** 2 / (beta2 * (1.0 - q_V))
    t = int(gen.integers(1, 300))
    g = _random_sequence(gen, t)
    k = np.arange(t, dtype=np.float64)
    A = beta1 ** k * np.expm1(k * math.log1p(q_M))
    B = (beta2 * (1.0 - q_V)) ** k
    lhs = float(np.sum(A * np.abs(g)) / math.sqrt(np.sum(B * g * g)))
    rhs = q_M * math.sqrt(r * (1.0 + r)) / ((1.0 + q_M) * (1.0 - r) ** 1.5)
    return lhs, rhs, {"beta1": beta1, "beta2": beta2, "q_M": q_M, "q_V": q_V, "t": t}


def discrete_error(gen: np.random.Generator, trial: int) -> Instance:
    """
    a_t = k (a_{t-1} + c_{t-1}) + d_t, b_t = k b_{t-1} + d_t with |c_t| <= q |a_t|:
    |a_t - b_t| <= sum_{j<t} ((k (1 + q))^(t-j) - k^(t-j)) |d_j|.
    """
    k = gen.uniform(0.01, 0.999)
    q = 0.0 if gen.random() < 0.1 else gen.uniform(0.0, k)
    t = int(gen.integers(1, 200))
    d = gen.standard_normal(t + 1) * _log_uniform(gen, 1e-3, 1e3)
    d[0] = 0.0
    # worst-case direction damped to 0.999 q
    u = np.where(gen.random(t + 1) < 0.5, gen.uniform(-1.0, 1.0, t + 1), 0.999).tolist()

    a = b = c = 0.0
    for step, d_t in enumerate(d.tolist()[1:], start=1):
        a = k * (a + c) + d_t
        b = k * b + d_t
        c = u[step] * q * a
    n = t - np.arange(1, t, dtype=np.float64)
    # (k (1 + q))^n - k^n without cancellation
    weights = k ** n * np.expm1(n * math.log1p(q))
    rhs = float(np.sum(weights * np.abs(d[1:t])))
    return abs(a - b), rhs, {"k": k, "q": q, "t": t}


def _perturb(gen: np.random.Generator, x: np.ndarray, q: float) -> np.ndarray:
    """x (1 + u) with |u| <= q, half the entries at the extremes."""
    u = gen.uniform(-q, q, size=x.shape)
    extreme = gen.random(x.shape) < 0.5
    u[extreme] = np.where(gen.random(int(extreme.sum())) < 0.5, -q, q)
    return x * (1.0 + u)


def moment_sandwich(gen: np.random.Generator, trial: int) -> Instance:
    """
    V_t = beta2 Q_V(V_{t-1}) + g_t^2 with |Q_V(x) - x| <= q_V |x| stays within
    sum (beta2 (1 -+ q_V))^(t-k) g_k^2. Reported as max(lo / V, V / hi) against 1.
    """
    beta2 = gen.uniform(0.5, 0.9999)
    q_V = 2.0 ** -int(gen.integers(1, 24))
    d = int(gen.integers(1, 16))
    steps = int(gen.integers(1, 40))
    V = lo = hi = np.zeros(d)
    worst = 0.0
    for step in range(steps):
        g2 = (gen.standard_normal(d) * _log_uniform(gen, 1e-2, 1e2)) ** 2
        stored = _perturb(gen, V, q_V) if step else V
        V = beta2 * stored + g2
        lo = beta2 * (1.0 - q_V) * lo + g2
        hi = beta2 * (1.0 + q_V) * hi + g2
        nz = V > 0.0
        if nz.any():
            worst = max(worst, float(np.max(lo[nz] / V[nz])), float(np.max(V[nz] / hi[nz])))
    return worst, 1.0, {"beta2": beta2, "q_V": q_V, "d": d, "steps": steps}


def adam_update_magnitude(gen: np.random.Generator, trial: int) -> Instance:
    """|M_t| / sqrt(eps + V_t) <= 1 / sqrt(1 - r') along any quantised weighted-sum trajectory."""
    beta2 = gen.uniform(0.5, 0.9999)
    q = 2.0 ** -int(gen.integers(2, 24))
    beta1 = gen.uniform(0.0, 0.999) * math.sqrt(beta2 * (1.0 - q)) / (1.0 + q)
    r = beta1 ** 2 * (1.0 + q) ** 2 / (beta2 * (1.0 - q))
    eps = _log_uniform(gen, 1e-8, 1e-2)
    d = int(gen.integers(1, 16))
    steps = int(gen.integers(1, 40))
    M = V = np.zeros(d)
    worst = 0.0
    for step in range(steps):
        g = gen.standard_normal(d) * _log_uniform(gen, 1e-3, 1e2)
        if step == 0:
            M, V = g.copy(), g * g
        else:
            M = beta1 * _perturb(gen, M, q) + g
            V = beta2 * _perturb(gen, V, q) + g * g
        worst = max(worst, float(np.max(np.abs(M) / np.sqrt(eps + V))))
    return worst, 1.0 / math.sqrt(1.0 - r), {"beta1": beta1, "beta2": beta2, "q": q, "steps": steps}


_ROUNDINGS = list(Rounding)


def _random_spec(gen: np.random.Generator, low: int = 1, high: int = 30) -> QuantSpec:
    return QuantSpec(
        mantissa_bits=int(gen.integers(low, high)),
        rounding=_ROUNDINGS[int(gen.integers(len(_ROUNDINGS)))],
        enabled=True,
    )


def gradient_estimator(gen: np.random.Generator, trial: int) -> Instance:
    """Averaged quantised gradients satisfy ||G^||_inf <= (1 + q_G)(R - sqrt(eps))."""
    R = _log_uniform(gen, 1e-2, 1e3)
    eps = min(_log_uniform(gen, 1e-12, 1e-4), (R / 2.0) ** 2)
    bound = R - math.sqrt(eps)
    spec = _random_spec(gen)
    workers = int(gen.integers(1, 9))
    shape = (int(gen.integers(1, 6)), int(gen.integers(1, 6)))
    stream = RngStream(seed=int(gen.integers(0, 2 ** 63))).derive(trial)
    total = np.zeros(shape)
    for i in range(workers):
        raw = gen.uniform(-2.0 * bound, 2.0 * bound, size=shape)
        g = elementwise_map(raw, lambda z: np.clip(z, -bound, bound))
        total += quantize_mat(g, spec, stream.derive(i))
    lhs = float(np.max(np.abs(total / workers)))
    return lhs, (1.0 + spec.q) * bound, {"R": R, "eps": eps, "M": spec.mantissa_bits,
                                        "rounding": spec.rounding.value, "workers": workers}


def matrix_quantization(gen: np.random.Generator, trial: int) -> Instance:
    """||Q(X) - X||_F <= q ||X||_F."""
    spec = _random_spec(gen)
    shape = (int(gen.integers(1, 9)), int(gen.integers(1, 9)))
    X = gen.standard_normal(shape) * _log_uniform(gen, 1e-30, 1e30)
    stream = RngStream(seed=int(gen.integers(0, 2 ** 63))).derive(trial)
    XQ = quantize_mat(X, spec, stream)
    return frob_norm(XQ - X), spec.q * frob_norm(X), {"M": spec.mantissa_bits,
                                                      "rounding": spec.rounding.value, "shape": shape}


def _random_matrix(gen: np.random.Generator) -> np.ndarray:
    m, n = int(gen.integers(1, 7)), int(gen.integers(1, 7))
    if gen.random() < 0.3:
        k = int(gen.integers(1, min(m, n) + 1))
        return gen.standard_normal((m, k)) @ gen.standard_normal((k, n))
    return gen.standard_normal((m, n))


def muon_update_norm(gen: np.random.Generator, trial: int) -> Instance:
    """||msign(M)||_F <= sqrt(r) with r = min(m, n)."""
    M = _random_matrix(gen)
    O = msign(M, OrthoMethod.EXACT_SVD)
    return frob_norm(O), math.sqrt(min(M.shape)), {"shape": M.shape}


def muon_weight_growth(gen: np.random.Generator, trial: int) -> Instance:
    """||W_t||_F <= ||W_0||_F + t eta sqrt(r) for W_{t+1} = W_t - eta msign(M_t)."""
    first = _random_matrix(gen)
    W = first * _log_uniform(gen, 1e-3, 1e1)
    D = frob_norm(W)
    eta = _log_uniform(gen, 1e-4, 1.0)
    r = min(W.shape)
    steps = int(gen.integers(1, 4))
    worst = 0.0
    for t in range(1, steps + 1):
        W = W - eta * msign(gen.standard_normal(W.shape), OrthoMethod.EXACT_SVD)
        worst = max(worst, frob_norm(W) / (D + t * eta * math.sqrt(r)))
    return worst, 1.0, {"shape": W.shape, "eta": eta, "steps": steps}


LEMMAS: Dict[str, Callable[[np.random.Generator, int], Instance]] = {
    "adaptive_ratio_sum": adaptive_ratio_sum,
    "geometric_sqrt_sum": geometric_sqrt_sum,
    "geometric_sqrt_linear_sum": geometric_sqrt_linear_sum,
    "finite_cauchy": finite_cauchy,
    "refined_cauchy": refined_cauchy,
    "discrete_error": discrete_error,
    "moment_sandwich": moment_sandwich,
    "adam_update_magnitude": adam_update_magnitude,
    "gradient_estimator": gradient_estimator,
    "matrix_quantization": matrix_quantization,
    "muon_update_norm": muon_update_norm,
    "muon_weight_growth": muon_weight_growth,
}


def check_lemma(name: str, seed: int, trials: int) -> LemmaResult:
    if name not in LEMMAS:
        raise KeyError(f"Unknown lemma '{name}'. Must be one of: {list(LEMMAS)}")
    checker = LEMMAS[name]
    gen = np.random.default_rng([seed, list(LEMMAS).index(name)])
    result = LemmaResult(name=name)
    for trial in range(trials):
        lhs, rhs, witness = checker(gen, trial)
        result.record(lhs, rhs, witness)
    return result


def check_lemma_suite(seed: int = 0, trials: int = 10_000, names: Optional[Sequence[str]] = None,
                      strict: bool = False) -> LemmaSuiteReport:
    """
    Run every lemma checker (or the named subset) for `trials` random instances.

    Raises:
        ValueError: If trials < 1
        LemmaViolated: With strict=True, for the first lemma that failed
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    report = LemmaSuiteReport(seed=seed, trials=trials)
    for name in names if names is not None else LEMMAS:
        result = check_lemma(name, seed, trials)
        report.results.append(result)
        logger.info("%s: %d trials, max ratio %.6g, %d violations", name, result.trials,
                    result.max_ratio, result.violations)
    if strict:
        report.raise_for_violations()
    return report
