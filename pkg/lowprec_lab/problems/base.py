"""
Objective framework shared by every benchmark problem.

Parameters are carried as a list of float64 arrays ("blocks"): one matrix for
Rosenbrock and the quadratic, alternating weight matrices and bias vectors
for the MLP. Optimisers and the training loop only ever see this list.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..quant.rng import RngStream

Params = List[np.ndarray]


class ProblemKind(str, Enum):
    ROSENBROCK = "rosenbrock"
    SYNTHETIC_MLP = "synthetic_mlp"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class ProblemSpec:
    """
    Problem description shared by objectives, oracles and the bound harness.

    m, n shape the single weight matrix of Rosenbrock and the quadratic.
    mlp_layers lists layer widths from input features to class logits.
    class_separation is the norm of every class mean of the synthetic dataset
    (unit-variance blobs around orthonormal directions).
    """
    kind: ProblemKind = ProblemKind.ROSENBROCK
    m: int = 50
    n: int = 100
    noise_sigma: float = 0.0
    mlp_layers: Tuple[int, ...] = (32, 64, 32, 16, 10)
    dataset_seed: int = 0
    dataset_size: int = 512
    num_classes: int = 10
    class_separation: float = 4.0
    init_seed: int = 0
    init_scale: float = 0.1
    clip_grad_inf: Optional[float] = None
    quad_h_min: float = 0.5
    quad_h_max: float = 2.0

    def __post_init__(self):
        if not isinstance(self.kind, ProblemKind):
            object.__setattr__(self, "kind", ProblemKind(self.kind))
        object.__setattr__(self, "mlp_layers", tuple(int(w) for w in self.mlp_layers))
        self.validate()

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"m and n must be positive, got m={self.m}, n={self.n}")
        if self.kind is ProblemKind.ROSENBROCK and self.n < 2:
            raise ValueError(f"Rosenbrock requires n >= 2, got n={self.n}")
        if self.noise_sigma < 0.0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.num_classes < 2:
            raise ValueError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.dataset_size < 1:
            raise ValueError(f"dataset_size must be positive, got {self.dataset_size}")
        if self.clip_grad_inf is not None and self.clip_grad_inf <= 0.0:
            raise ValueError(f"clip_grad_inf must be positive, got {self.clip_grad_inf}")
        if not 0.0 < self.quad_h_min <= self.quad_h_max:
            raise ValueError(
                f"need 0 < quad_h_min <= quad_h_max, got {self.quad_h_min}, {self.quad_h_max}"
            )
        if self.kind is ProblemKind.SYNTHETIC_MLP:
            if len(self.mlp_layers) < 2 or min(self.mlp_layers) < 1:
                raise ValueError(f"mlp_layers needs at least two positive widths, got {self.mlp_layers}")
            if self.mlp_layers[-1] != self.num_classes:
                raise ValueError(
                    f"last MLP width {self.mlp_layers[-1]} must equal num_classes {self.num_classes}"
                )

    @property
    def dimension(self) -> int:
        """Number of trainable scalars."""
        if self.kind is ProblemKind.SYNTHETIC_MLP:
            widths = self.mlp_layers
            return sum(a * b + b for a, b in zip(widths[:-1], widths[1:]))
        return self.m * self.n


@dataclass
class GradSample:
    value: float
    grad: Params
    batch_ids: Tuple[int, ...] = field(default_factory=tuple)


class BaseObjective(ABC):
    """
    Abstract objective F with a stochastic-gradient oracle.

    Subclasses provide value, full_grad and init_params; the default
    sample_grad adds Gaussian noise of per-entry std noise_sigma / sqrt(batch)
    to the exact gradient, which keeps it unbiased.
    """

    def __init__(self, spec: ProblemSpec):
        self.spec = spec

    @abstractmethod
    def value(self, params: Params) -> float:
        """Objective value F(params)."""

    @abstractmethod
    def full_grad(self, params: Params) -> Params:
        """Exact gradient of F."""

    @abstractmethod
    def init_params(self) -> Params:
        """Deterministic initial point W_0."""

    def matrix_blocks(self, params: Params) -> List[bool]:
        """Which blocks are matrices (orthogonalised by Muon)."""
        return [p.ndim == 2 for p in params]

    def sample_grad(self, params: Params, rng: RngStream, batch: int = 1) -> GradSample:
        if batch < 1:
            raise ValueError(f"batch must be >= 1, got {batch}")
        grad = self.full_grad(params)
        if self.spec.noise_sigma > 0.0:
            gen = rng.generator()
            std = self.spec.noise_sigma / np.sqrt(batch)
            grad = [g + gen.normal(0.0, std, size=g.shape) for g in grad]
        return GradSample(value=self.value(params), grad=self.clip(grad))

    def clip(self, grad: Params) -> Params:
        bound = self.spec.clip_grad_inf
        if bound is None:
            return grad
        return [np.clip(g, -bound, bound) for g in grad]

    def finite_difference_grad(self, params: Params, step: float = 1e-6) -> Params:
        """Central-difference gradient, one coordinate at a time (test oracle)."""
        out = []
        for b, block in enumerate(params):
            g = np.zeros_like(block)
            for idx in np.ndindex(block.shape):
                shifted = [p.copy() for p in params]
                shifted[b][idx] = block[idx] + step
                up = self.value(shifted)
                shifted[b][idx] = block[idx] - step
                down = self.value(shifted)
                g[idx] = (up - down) / (2.0 * step)
            out.append(g)
        return out


def blocks_norm(blocks: Sequence[np.ndarray]) -> float:
    """Frobenius norm of a parameter list viewed as one vector."""
    return float(np.sqrt(sum(float(np.sum(b * b)) for b in blocks)))


def blocks_inf_norm(blocks: Sequence[np.ndarray]) -> float:
    return max((float(np.max(np.abs(b))) for b in blocks if b.size), default=0.0)
