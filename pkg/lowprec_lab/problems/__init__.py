"""
Objectives and stochastic-gradient oracles.

Key modules:
    - rosenbrock: matrix Rosenbrock benchmark
    - mlp / dataset: ReLU classifier on a synthetic blob dataset
    - quadratic: convex quadratic with certifiable constants
    - oracle: make_objective and sample_stochastic_grad
"""

from .base import BaseObjective, GradSample, Params, ProblemKind, ProblemSpec, blocks_inf_norm, blocks_norm
from .dataset import SyntheticDataset, export_dataset, import_dataset, make_synthetic_dataset
from .mlp import MlpObjective, init_mlp_params, mlp_loss_and_grad
from .oracle import make_objective, sample_stochastic_grad
from .quadratic import QuadraticObjective
from .rosenbrock import RosenbrockObjective, rosenbrock_grad, rosenbrock_value

__all__ = [
    "BaseObjective",
    "GradSample",
    "Params",
    "ProblemKind",
    "ProblemSpec",
    "blocks_inf_norm",
    "blocks_norm",
    "SyntheticDataset",
    "export_dataset",
    "import_dataset",
    "make_synthetic_dataset",
    "MlpObjective",
    "init_mlp_params",
    "mlp_loss_and_grad",
    "make_objective",
    "sample_stochastic_grad",
    "QuadraticObjective",
    "RosenbrockObjective",
    "rosenbrock_grad",
    "rosenbrock_value",
]
