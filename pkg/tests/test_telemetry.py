"""Telemetry and summary files."""

import csv
from dataclasses import replace

import pytest

from lowprec_lab.constants import CSV_HEADER, SWEEP_SUMMARY_HEADER
from lowprec_lab.errors import FormatError
from lowprec_lab.optim import AdamHyper
from lowprec_lab.training import (
    TrainConfig,
    TrainRecord,
    read_csv,
    read_jsonl,
    read_summary,
    run_training,
    tail_mean,
    write_records,
    write_summary,
    write_sweep_summary,
)


@pytest.fixture
def result(small_rosenbrock):
    cfg = TrainConfig(problem=small_rosenbrock, adam=AdamHyper(eta=1e-3), T=30, seed=2)
    return run_training(cfg.with_mantissa(10, ["gradients", "moment1"]))


class TestRecordFiles:

    @pytest.mark.parametrize("fmt,reader", [("csv", read_csv), ("jsonl", read_jsonl)])
    def test_round_trip(self, result, tmp_path, fmt, reader):
        path = write_records(result.records, tmp_path / f"run.{fmt}", fmt)
        assert reader(path) == result.records

    def test_csv_layout(self, result, tmp_path):
        path = write_records(result.records, tmp_path / "run.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 31
        first = dict(zip(CSV_HEADER, lines[1].split(",")))
        assert first["qerr_W"] == "" and first["wall_ns"] == ""
        assert float(first["loss"]) == result.records[0].loss

    def test_unknown_header(self, tmp_path):
        path = tmp_path / "run.csv"
        path.write_text("t,loss\n0,1.0\n")
        with pytest.raises(FormatError):
            read_csv(path)

    def test_malformed_value(self, tmp_path):
        path = tmp_path / "run.csv"
        path.write_text(",".join(CSV_HEADER) + "\nzero,1.0,1.0,,,,,0.0,\n")
        with pytest.raises(FormatError):
            read_csv(path)

    def test_malformed_jsonl(self, tmp_path):
        path = tmp_path / "run.jsonl"
        path.write_text('{"t": 0}\n')
        with pytest.raises(FormatError):
            read_jsonl(path)

    def test_unknown_format(self, result, tmp_path):
        with pytest.raises(ValueError):
            write_records(result.records, tmp_path / "run.xml", "xml")

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_csv(tmp_path / "nope.csv")


class TestSummary:

    def test_tail_matches_records(self, result, tmp_path):
        summary = read_summary(write_summary(result, tmp_path / "summary.txt"))
        records = read_csv(write_records(result.records, tmp_path / "run.csv"))
        assert float(summary["tail_grad_norm"]) == tail_mean([r.grad_norm_F for r in records])
        assert summary["checksum"] == result.checksum
        assert summary["config.T"] == "30"
        assert summary["config.policy.gradients.enabled"] == "true"

    def test_tail_mean_window(self):
        assert tail_mean([1.0, 2.0, 3.0, 5.0], window=2) == 4.0
        assert tail_mean([2.0], window=100) == 2.0
        with pytest.raises(ValueError):
            tail_mean([])

    def test_sweep_summary(self, result, tmp_path):
        other = replace(result, tail_grad_norm=0.5)
        path = write_sweep_summary([10, 12], [result, other], tmp_path / "sweep_summary.csv")
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == SWEEP_SUMMARY_HEADER
        assert rows[1][0] == "10" and rows[2][1] == "0.5"
        assert rows[1][2] == ""
        assert 0.0 < float(rows[1][3]) <= 2.0 ** -10


def test_record_dict_order():
    record = TrainRecord(t=0, loss=1.0, grad_norm_F=2.0)
    assert tuple(record.as_dict()) == CSV_HEADER
