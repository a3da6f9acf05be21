"""LPOPT* binary container."""

import numpy as np
import pytest

from lowprec_lab.binfmt import read_blob, write_blob
from lowprec_lab.errors import FormatError

MAGIC = b"LPOPTXX1"


class TestBlob:

    def test_header_and_payload(self, tmp_path):
        path = write_blob(tmp_path / "x.bin", MAGIC, [3, 2], [np.arange(6.0).reshape(3, 2)])
        header, payload = read_blob(path, MAGIC)
        assert header == [3, 2]
        np.testing.assert_array_equal(payload, np.arange(6.0))

    def test_little_endian_layout(self, tmp_path):
        path = write_blob(tmp_path / "x.bin", MAGIC, [1], [np.array([1.0])])
        raw = path.read_bytes()
        assert raw[:8] == MAGIC
        assert raw[8:16] == (1).to_bytes(8, "little")
        assert raw[16:24] == (1).to_bytes(8, "little")
        assert raw[24:] == np.array([1.0], dtype="<f8").tobytes()

    def test_wrong_magic(self, tmp_path):
        path = write_blob(tmp_path / "x.bin", MAGIC, [], [])
        with pytest.raises(FormatError, match="magic"):
            read_blob(path, b"LPOPTYY1")

    def test_truncated_body(self, tmp_path):
        path = write_blob(tmp_path / "x.bin", MAGIC, [1], [np.ones(2)])
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FormatError):
            read_blob(path, MAGIC)

    def test_rejects_bad_magic_length_and_negative_header(self, tmp_path):
        with pytest.raises(FormatError):
            write_blob(tmp_path / "x.bin", b"short", [], [])
        with pytest.raises(FormatError):
            write_blob(tmp_path / "x.bin", MAGIC, [-1], [])
