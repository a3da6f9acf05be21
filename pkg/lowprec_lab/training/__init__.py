"""
Quantised master/worker training.

Key modules:
    - config: TrainConfig
    - loop: run_training, run_reference_training, sweep
    - records: TrainRecord, RunResult, TrajectoryStats
    - telemetry: CSV / JSONL / summary files
"""

from .config import TrainConfig
from .loop import optimizer_stream, oracle_stream, quantize_blocks, run_reference_training, run_training, sweep
from .records import RunResult, TrainRecord, TrajectoryStats, checksum, tail_mean
from .telemetry import (
    read_csv,
    read_jsonl,
    read_summary,
    write_csv,
    write_jsonl,
    write_records,
    write_summary,
    write_sweep_summary,
)

__all__ = [
    "TrainConfig",
    "optimizer_stream",
    "oracle_stream",
    "quantize_blocks",
    "run_reference_training",
    "run_training",
    "sweep",
    "RunResult",
    "TrainRecord",
    "TrajectoryStats",
    "checksum",
    "tail_mean",
    "read_csv",
    "read_jsonl",
    "read_summary",
    "write_csv",
    "write_jsonl",
    "write_records",
    "write_summary",
    "write_sweep_summary",
]
