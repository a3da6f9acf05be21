"""
Optimiser state snapshots in the LPOPTST1 container.

Header integers:
    kind (0 Adam, 1 Muon), variant (0 weighted-sum, 1 weighted-average),
    t, block count, then (ndim, rows, cols) per block with cols = 0 for vectors.
Payload: the stored M blocks, then the V blocks for Adam.
"""

from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from ..binfmt import read_blob, write_blob
from ..constants import STATE_MAGIC
from ..errors import FormatError
from .adam import AdamState
from .hyper import AdamVariant
from .muon import MuonState

_KIND_ADAM = 0
_KIND_MUON = 1
_VARIANTS = [AdamVariant.WEIGHTED_SUM, AdamVariant.WEIGHTED_AVERAGE]

OptimState = Union[AdamState, MuonState]


def _shape_header(blocks: Sequence[np.ndarray]) -> List[int]:
    out = []
    for b in blocks:
        if b.ndim not in (1, 2):
            raise FormatError(f"only vector and matrix blocks can be stored, got shape {b.shape}")
        rows, cols = (b.shape[0], 0) if b.ndim == 1 else b.shape
        out.extend([b.ndim, rows, cols])
    return out


def save_state(state: OptimState, path: Union[str, Path]) -> Path:
    """Write an AdamState or MuonState; returns the path."""
    if isinstance(state, AdamState):
        header = [_KIND_ADAM, _VARIANTS.index(state.variant), state.t, len(state.M)]
        arrays = list(state.M) + list(state.V)
    elif isinstance(state, MuonState):
        header = [_KIND_MUON, 0, state.t, len(state.M)]
        arrays = list(state.M)
    else:
        raise TypeError(f"cannot snapshot {type(state).__name__}")
    return write_blob(path, STATE_MAGIC, header + _shape_header(state.M), arrays)


def load_state(path: Union[str, Path]) -> OptimState:
    """
    Read a snapshot written by save_state.

    Measured quantisation errors are not stored and come back as None.

    Raises:
        FormatError: If the header or payload size is inconsistent
    """
    header, payload = read_blob(path, STATE_MAGIC)
    if len(header) < 4:
        raise FormatError(f"{path}: state header too short")
    kind, variant, t, count = header[:4]
    if kind not in (_KIND_ADAM, _KIND_MUON) or variant >= len(_VARIANTS):
        raise FormatError(f"{path}: unknown state kind {kind} / variant {variant}")
    if len(header) != 4 + 3 * count:
        raise FormatError(f"{path}: expected {4 + 3 * count} header integers, found {len(header)}")

    shapes = []
    for i in range(count):
        ndim, rows, cols = header[4 + 3 * i: 7 + 3 * i]
        shapes.append((rows,) if ndim == 1 else (rows, cols))
    sizes = [int(np.prod(s)) for s in shapes]
    copies = 2 if kind == _KIND_ADAM else 1
    if payload.size != copies * sum(sizes):
        raise FormatError(f"{path}: expected {copies * sum(sizes)} values, found {payload.size}")

    def unpack(offset: int) -> List[np.ndarray]:
        blocks = []
        for shape, size in zip(shapes, sizes):
            blocks.append(payload[offset: offset + size].reshape(shape).copy())
            offset += size
        return blocks

    M = unpack(0)
    if kind == _KIND_MUON:
        return MuonState(t=t, M=M)
    return AdamState(t=t, M=M, V=unpack(sum(sizes)), variant=_VARIANTS[variant])
