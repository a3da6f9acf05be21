"""Shared fixtures: seeded generators and small problems."""

import numpy as np
import pytest

from lowprec_lab.problems.base import ProblemKind, ProblemSpec
from lowprec_lab.quant.rng import RngStream


@pytest.fixture
def gen():
    return np.random.default_rng(12345)


@pytest.fixture
def stream():
    return RngStream(seed=2024)


@pytest.fixture
def small_rosenbrock():
    return ProblemSpec(kind=ProblemKind.ROSENBROCK, m=4, n=6)


@pytest.fixture
def small_quadratic():
    return ProblemSpec(kind=ProblemKind.QUADRATIC, m=5, n=5)


@pytest.fixture
def small_mlp():
    return ProblemSpec(kind=ProblemKind.SYNTHETIC_MLP, mlp_layers=(6, 8, 3), num_classes=3,
                       dataset_size=60)
