"""
Matrix Rosenbrock benchmark.

F(W) = sum_j 100 ||W_{j+1} - W_j^2||^2 + ||1 - W_j||^2 over columns j = 1..n-1,
squares taken entrywise. The global minimum is the all-ones matrix.
"""

import numpy as np

from ..errors import DimMismatch
from .base import BaseObjective, Params


def _check(W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[1] < 2:
        raise DimMismatch(f"Rosenbrock needs an m x n matrix with n >= 2, got {W.shape}")
    return W


def rosenbrock_value(W: np.ndarray) -> float:
    W = _check(W)
    X, Y = W[:, :-1], W[:, 1:]
    return float(np.sum(100.0 * (Y - X * X) ** 2) + np.sum((1.0 - X) ** 2))


def rosenbrock_grad(W: np.ndarray) -> np.ndarray:
    W = _check(W)
    X, Y = W[:, :-1], W[:, 1:]
    residual = Y - X * X
    grad = np.zeros_like(W)
    grad[:, :-1] += -2.0 * (1.0 - X) - 400.0 * X * residual
    grad[:, 1:] += 200.0 * residual
    return grad


class RosenbrockObjective(BaseObjective):
    """Deterministic Rosenbrock; W_0 = 1 + init_scale * N(0, 1) from init_seed."""

    def value(self, params: Params) -> float:
        return rosenbrock_value(params[0])

    def full_grad(self, params: Params) -> Params:
        return [rosenbrock_grad(params[0])]

    def init_params(self) -> Params:
        gen = np.random.default_rng(self.spec.init_seed)
        W0 = 1.0 + self.spec.init_scale * gen.standard_normal((self.spec.m, self.spec.n))
        return [W0]
