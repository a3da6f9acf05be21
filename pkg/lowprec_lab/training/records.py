"""Telemetry rows and run results."""

import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..constants import CSV_HEADER, TAIL_WINDOW


@dataclass(frozen=True)
class TrainRecord:
    """
    One telemetry row.

    loss and grad_norm_F are evaluated at the full-precision master weights
    W_t before the step. A qerr is None when its component is not quantised
    or its reference is zero. wall_ns is None unless wall-time recording is on.
    """
    t: int
    loss: float
    grad_norm_F: float
    qerr_W: Optional[float] = None
    qerr_G: Optional[float] = None
    qerr_M: Optional[float] = None
    qerr_V: Optional[float] = None
    update_norm_F: float = 0.0
    wall_ns: Optional[int] = None

    def as_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in CSV_HEADER}


@dataclass(frozen=True)
class TrajectoryStats:
    """Quantities observed along the trajectory, used to certify bound inputs."""
    max_grad_inf: float = 0.0
    lipschitz_estimate: float = 0.0
    initial_weight_norm: float = 0.0
    initial_grad_norm: float = 0.0
    initial_loss: float = 0.0
    final_loss: float = 0.0
    max_weight_norm: float = 0.0


@dataclass
class RunResult:
    records: List[TrainRecord]
    checksum: str
    tail_grad_norm: float
    config: Dict[str, Any] = field(default_factory=dict)
    grad_norm_history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    final_params: List[np.ndarray] = field(default_factory=list)
    stats: TrajectoryStats = field(default_factory=TrajectoryStats)

    @property
    def T(self) -> int:
        return int(self.grad_norm_history.shape[0])

    def mean_qerr(self, column: str) -> Optional[float]:
        """Mean of a qerr column over the rows where it was measured."""
        values = [getattr(r, column) for r in self.records if getattr(r, column) is not None]
        return float(np.mean(values)) if values else None

    @property
    def final_loss(self) -> float:
        return self.stats.final_loss


def tail_mean(values: Sequence[float], window: int = TAIL_WINDOW) -> float:
    """Mean of the last `window` values (all of them when fewer)."""
    if len(values) == 0:
        raise ValueError("tail_mean of an empty sequence")
    tail = np.asarray(values[-window:], dtype=np.float64)
    return float(np.mean(tail))


def checksum(params: Sequence[np.ndarray]) -> str:
    """sha256 of the parameters' little-endian float64 bytes, block by block."""
    digest = hashlib.sha256()
    for p in params:
        digest.update(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return digest.hexdigest()
