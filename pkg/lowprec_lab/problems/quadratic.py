"""
Separable convex quadratic F(W) = 1/2 sum h_ij (W_ij - W*_ij)^2.

Curvatures h lie in [quad_h_min, quad_h_max], so L = quad_h_max holds
globally and F* = 0. Used where bound constants must be certifiable.
"""

import numpy as np

from .base import BaseObjective, Params


class QuadraticObjective(BaseObjective):

    def __init__(self, spec):
        super().__init__(spec)
        gen = np.random.default_rng(spec.dataset_seed)
        shape = (spec.m, spec.n)
        self.curvature = gen.uniform(spec.quad_h_min, spec.quad_h_max, size=shape)
        self.minimizer = gen.standard_normal(shape)

    @property
    def smoothness(self) -> float:
        return float(self.spec.quad_h_max)

    @property
    def optimal_value(self) -> float:
        return 0.0

    def value(self, params: Params) -> float:
        diff = params[0] - self.minimizer
        return float(0.5 * np.sum(self.curvature * diff * diff))

    def full_grad(self, params: Params) -> Params:
        return [self.curvature * (params[0] - self.minimizer)]

    def init_params(self) -> Params:
        gen = np.random.default_rng(self.spec.init_seed)
        return [self.spec.init_scale * gen.standard_normal((self.spec.m, self.spec.n))]
