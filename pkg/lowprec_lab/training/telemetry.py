"""
Telemetry files.

CSV rows follow CSV_HEADER; floats are written with repr() (shortest
round-trip decimal) and missing values as empty fields. JSONL carries the
same keys with null for missing values.
"""

import csv
import json
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

from ..constants import CSV_HEADER, SWEEP_SUMMARY_HEADER
from ..errors import FormatError
from .records import RunResult, TrainRecord

PathLike = Union[str, Path]

_INT_FIELDS = {"t", "wall_ns", "M"}


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name: str, text: str) -> Any:
    if text == "":
        return None
    try:
        return int(text) if name in _INT_FIELDS else float(text)
    except ValueError:
        raise FormatError(f"column {name}: cannot parse {text!r}") from None


def write_csv(records: Iterable[TrainRecord], path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            row = record.as_dict()
            writer.writerow([format_value(row[name]) for name in CSV_HEADER])
    return path


def read_csv(path: PathLike) -> List[TrainRecord]:
    """
    Parse a run CSV back into records.

    Raises:
        FileNotFoundError: If the file doesn't exist
        FormatError: If the header differs from CSV_HEADER or a value is malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Telemetry file not found: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise FormatError(f"{path}: unexpected header {header}")
        return [TrainRecord(**{name: _parse(name, text) for name, text in zip(CSV_HEADER, row)})
                for row in reader if row]


def write_jsonl(records: Iterable[TrainRecord], path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(record.as_dict()) + "\n")
    return path


def read_jsonl(path: PathLike) -> List[TrainRecord]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Telemetry file not found: {path}")
    records = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(TrainRecord(**json.loads(line)))
            except (json.JSONDecodeError, TypeError) as e:
                raise FormatError(f"{path}:{lineno}: {e}") from None
    return records


def write_records(records: Sequence[TrainRecord], path: PathLike, fmt: str = "csv") -> Path:
    if fmt == "csv":
        return write_csv(records, path)
    if fmt == "jsonl":
        return write_jsonl(records, path)
    raise ValueError(f"Unknown telemetry format '{fmt}'. Must be 'csv' or 'jsonl'")


def write_summary(result: RunResult, path: PathLike) -> Path:
    """summary.txt: tail gradient norm, final loss, checksum, then the config echo."""
    lines = [
        f"tail_grad_norm = {format_value(result.tail_grad_norm)}",
        f"final_loss = {format_value(result.final_loss)}",
        f"checksum = {result.checksum}",
    ]
    lines += [f"config.{key} = {format_value(value)}" for key, value in result.config.items()]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_summary(path: PathLike) -> dict:
    """key -> text map of a summary file."""
    out = {}
    for line in Path(path).read_text().splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            out[key] = value
    return out


def write_sweep_summary(mantissas: Sequence[int], results: Sequence[RunResult], path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_SUMMARY_HEADER)
        for M, result in zip(mantissas, results):
            row: List[Optional[Any]] = [M, result.tail_grad_norm]
            row += [result.mean_qerr(f"qerr_{c}") for c in ("W", "G", "M", "V")]
            writer.writerow([format_value(v) for v in row])
    return path
