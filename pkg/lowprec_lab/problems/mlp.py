"""
Fully connected ReLU network with softmax cross-entropy, trained on the
synthetic blob dataset. Parameters are [W1, b1, W2, b2, ...] with W_l of shape
(fan_in, fan_out).
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..quant.rng import RngStream
from .base import BaseObjective, GradSample, Params, ProblemSpec
from .dataset import SyntheticDataset, make_synthetic_dataset


def init_mlp_params(layers: Sequence[int], seed: int) -> Params:
    """Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases."""
    gen = np.random.default_rng(seed)
    params: Params = []
    for fan_in, fan_out in zip(layers[:-1], layers[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        params.append(gen.uniform(-limit, limit, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def mlp_forward(params: Params, X: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """Logits plus the per-layer inputs and pre-activations backprop needs."""
    inputs = [X]
    pre = []
    n_layers = len(params) // 2
    h = X
    for layer in range(n_layers):
        z = h @ params[2 * layer] + params[2 * layer + 1]
        pre.append(z)
        if layer < n_layers - 1:
            h = np.maximum(z, 0.0)
            inputs.append(h)
    return pre[-1], inputs, pre


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits: np.ndarray, y: np.ndarray) -> float:
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    return float(np.mean(log_norm - shifted[np.arange(len(y)), y]))


def mlp_loss_and_grad(params: Params, X: np.ndarray, y: np.ndarray) -> Tuple[float, Params]:
    """Mean cross-entropy over the batch and its gradient by backprop."""
    logits, inputs, pre = mlp_forward(params, X)
    loss = cross_entropy(logits, y)

    dz = _softmax(logits)
    dz[np.arange(len(y)), y] -= 1.0
    dz /= len(y)

    grads: Params = [np.zeros(0)] * len(params)
    for layer in reversed(range(len(params) // 2)):
        grads[2 * layer] = inputs[layer].T @ dz
        grads[2 * layer + 1] = dz.sum(axis=0)
        if layer > 0:
            dz = (dz @ params[2 * layer].T) * (pre[layer - 1] > 0.0)
    return loss, grads


class MlpObjective(BaseObjective):
    """Full-dataset loss; minibatches drawn uniformly with replacement."""

    def __init__(self, spec: ProblemSpec, dataset: Optional[SyntheticDataset] = None):
        super().__init__(spec)
        self.dataset = dataset if dataset is not None else make_synthetic_dataset(spec)
        self.layers = spec.mlp_layers

    def value(self, params: Params) -> float:
        logits, _, _ = mlp_forward(params, self.dataset.X)
        return cross_entropy(logits, self.dataset.y)

    def full_grad(self, params: Params) -> Params:
        return mlp_loss_and_grad(params, self.dataset.X, self.dataset.y)[1]

    def init_params(self) -> Params:
        return init_mlp_params(self.layers, self.spec.init_seed)

    def accuracy(self, params: Params) -> float:
        logits, _, _ = mlp_forward(params, self.dataset.X)
        return float(np.mean(np.argmax(logits, axis=1) == self.dataset.y))

    def sample_grad(self, params: Params, rng: RngStream, batch: int = 1) -> GradSample:
        if batch < 1:
            raise ValueError(f"batch must be >= 1, got {batch}")
        ids = rng.generator().integers(0, self.dataset.size, size=batch)
        loss, grads = mlp_loss_and_grad(params, self.dataset.X[ids], self.dataset.y[ids])
        return GradSample(value=loss, grad=self.clip(grads), batch_ids=tuple(int(i) for i in ids))
