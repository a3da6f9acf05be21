"""
Synthetic Gaussian-blob classification set.

Class c has mean class_separation * e_c for orthonormal directions e_c and
unit covariance. Labels are assigned round-robin so the histogram is balanced
within one sample. Everything is reproducible from dataset_seed.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from ..binfmt import read_blob, write_blob
from ..constants import DATASET_MAGIC
from ..errors import FormatError
from .base import ProblemSpec


@dataclass(frozen=True)
class SyntheticDataset:
    X: np.ndarray
    y: np.ndarray
    num_classes: int
    seed: int

    @property
    def size(self) -> int:
        return int(self.X.shape[0])

    @property
    def num_features(self) -> int:
        return int(self.X.shape[1])

    def label_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.num_classes)


def _class_means(gen: np.random.Generator, num_features: int, num_classes: int,
                 separation: float) -> np.ndarray:
    if num_classes <= num_features:
        Q, _ = np.linalg.qr(gen.standard_normal((num_features, num_classes)))
        directions = Q.T
    else:
        directions = gen.standard_normal((num_classes, num_features))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return separation * directions


def make_synthetic_dataset(spec: ProblemSpec) -> SyntheticDataset:
    """Deterministic dataset for spec.mlp_layers[0] features and spec.num_classes classes."""
    if spec.num_classes < 2:
        raise ValueError(f"num_classes must be >= 2, got {spec.num_classes}")

    gen = np.random.default_rng(spec.dataset_seed)
    num_features = spec.mlp_layers[0]
    means = _class_means(gen, num_features, spec.num_classes, spec.class_separation)

    y = np.arange(spec.dataset_size) % spec.num_classes
    X = means[y] + gen.standard_normal((spec.dataset_size, num_features))
    X.setflags(write=False)
    y.setflags(write=False)
    return SyntheticDataset(X=X, y=y, num_classes=spec.num_classes, seed=spec.dataset_seed)


def export_dataset(dataset: SyntheticDataset, path: Union[str, Path]) -> Path:
    """Write the dataset as an LPOPTDS1 container."""
    header = [dataset.size, dataset.num_features, dataset.num_classes, dataset.seed]
    return write_blob(path, DATASET_MAGIC, header, [dataset.X, dataset.y.astype(np.float64)])


def import_dataset(path: Union[str, Path]) -> SyntheticDataset:
    header, payload = read_blob(path, DATASET_MAGIC)
    if len(header) != 4:
        raise FormatError(f"{path}: dataset header needs 4 integers, found {len(header)}")
    size, num_features, num_classes, seed = header
    expected = size * num_features + size
    if payload.size != expected:
        raise FormatError(f"{path}: expected {expected} values, found {payload.size}")

    X = payload[: size * num_features].reshape(size, num_features)
    y = payload[size * num_features:].astype(np.int64)
    return SyntheticDataset(X=X, y=y, num_classes=num_classes, seed=seed)
