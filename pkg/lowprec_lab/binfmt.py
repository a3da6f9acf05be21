"""
Flat little-endian container shared by dataset fixtures and optimiser snapshots.

Layout:
    8 bytes   magic
    uint64    number of header integers h
    h uint64  header integers
    float64   payload, until end of file
"""

from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import FormatError

_U64 = np.dtype("<u8")
_F64 = np.dtype("<f8")


def write_blob(path: Union[str, Path], magic: bytes, header: Sequence[int],
               arrays: Sequence[np.ndarray]) -> Path:
    """
    Write a container file.

    Args:
        path: Destination file
        magic: Eight-byte format tag
        header: Non-negative integers describing the payload
        arrays: Arrays flattened row-major and concatenated as the payload

    Returns:
        The written path
    """
    if len(magic) != 8:
        raise FormatError(f"magic must be 8 bytes, got {magic!r}")
    if any(int(h) < 0 for h in header):
        raise FormatError(f"header integers must be non-negative: {list(header)}")

    path = Path(path)
    head = np.array([len(header), *[int(h) for h in header]], dtype=_U64)
    if arrays:
        payload = np.concatenate([np.ascontiguousarray(a, dtype=np.float64).ravel() for a in arrays])
    else:
        payload = np.zeros(0)

    with open(path, "wb") as f:
        f.write(magic)
        f.write(head.tobytes())
        f.write(payload.astype(_F64).tobytes())
    return path


def read_blob(path: Union[str, Path], magic: bytes) -> Tuple[List[int], np.ndarray]:
    """
    Read a container file written by write_blob.

    Returns:
        (header integers, flat float64 payload)

    Raises:
        FileNotFoundError: If the file doesn't exist
        FormatError: If the magic or the sizes do not match
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Binary file not found: {path}")

    raw = path.read_bytes()
    if raw[:8] != magic:
        raise FormatError(f"{path}: expected magic {magic!r}, found {raw[:8]!r}")
    if len(raw) < 16:
        raise FormatError(f"{path}: truncated header")

    count = int(np.frombuffer(raw, dtype=_U64, count=1, offset=8)[0])
    body = 16 + 8 * count
    if len(raw) < body or (len(raw) - body) % 8:
        raise FormatError(f"{path}: truncated body")

    header = [int(h) for h in np.frombuffer(raw, dtype=_U64, count=count, offset=16)]
    n_values = (len(raw) - body) // 8
    if n_values:
        payload = np.frombuffer(raw, dtype=_F64, count=n_values, offset=body).astype(np.float64)
    else:
        payload = np.zeros(0)
    return header, payload
