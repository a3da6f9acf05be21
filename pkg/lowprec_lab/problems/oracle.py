"""Objective factory and the stochastic-gradient oracle entry point."""

from functools import lru_cache
from typing import Union

import numpy as np

from ..quant.rng import RngStream
from .base import BaseObjective, GradSample, Params, ProblemKind, ProblemSpec
from .mlp import MlpObjective
from .quadratic import QuadraticObjective
from .rosenbrock import RosenbrockObjective

_OBJECTIVES = {
    ProblemKind.ROSENBROCK: RosenbrockObjective,
    ProblemKind.SYNTHETIC_MLP: MlpObjective,
    ProblemKind.QUADRATIC: QuadraticObjective,
}


@lru_cache(maxsize=16)
def make_objective(spec: ProblemSpec) -> BaseObjective:
    """Objective for `spec`; cached because the MLP builds its dataset up front."""
    return _OBJECTIVES[spec.kind](spec)


def sample_stochastic_grad(spec: ProblemSpec, W: Union[np.ndarray, Params], rng: RngStream,
                           batch: int = 1) -> GradSample:
    """
    One stochastic gradient of the problem at W.

    Rosenbrock and the quadratic return the exact gradient plus Gaussian noise
    of per-entry std noise_sigma / sqrt(batch); the MLP returns a minibatch
    cross-entropy gradient. A bare matrix W is treated as a one-block list.
    """
    params = [W] if isinstance(W, np.ndarray) else list(W)
    return make_objective(spec).sample_grad(params, rng, batch)
