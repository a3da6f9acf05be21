"""Parameter-list plumbing shared by the optimiser steps."""

from typing import List, Sequence, Tuple, Union

import numpy as np

from ..errors import DimMismatch, NonFiniteGradient

Blocks = Union[np.ndarray, Sequence[np.ndarray]]


def as_blocks(x: Blocks) -> Tuple[List[np.ndarray], bool]:
    """(list of float64 blocks, whether x was a bare array)."""
    if isinstance(x, np.ndarray):
        return [np.asarray(x, dtype=np.float64)], True
    return [np.asarray(b, dtype=np.float64) for b in x], False


def unwrap(blocks: List[np.ndarray], single: bool) -> Blocks:
    return blocks[0] if single else blocks


def check_step_inputs(W: List[np.ndarray], G: List[np.ndarray], state: Sequence[np.ndarray]) -> None:
    """Shapes of W, G and the stored moments must agree and G must be finite."""
    if len(W) != len(G) or len(W) != len(state):
        raise DimMismatch(
            f"block counts differ: {len(W)} weights, {len(G)} gradients, {len(state)} moments"
        )
    for i, (w, g, s) in enumerate(zip(W, G, state)):
        if w.shape != g.shape or w.shape != s.shape:
            raise DimMismatch(f"block {i}: weights {w.shape}, gradient {g.shape}, moment {s.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"block {i} of the gradient contains NaN or infinity")


def average_blocks(samples: Sequence[Sequence[np.ndarray]]) -> List[np.ndarray]:
    """Mean of per-worker gradient lists, summed in worker order."""
    if not samples:
        raise ValueError("need at least one gradient sample")
    acc = [np.array(g, dtype=np.float64) for g in samples[0]]
    for sample in samples[1:]:
        for a, g in zip(acc, sample):
            a += g
    count = float(len(samples))
    return [a / count for a in acc]
