"""Bit-exact binary file format for voxel datasets.

Layout (all integers little-endian):

    offset  size  field
    0       4     magic "VXG1"
    4       2     version (currently 1)
    6       2     channels
    8       6     dx, dy, dz (u16 each)
    14      8     sample_count (u64)
    22      ...   samples, each channels*dx*dy*dz bytes, one byte per voxel
                  (0 or 1), laid out channel-major then x, y, z fastest

Sample i starts at byte 22 + i * channels*dx*dy*dz, so random access needs
no index. One byte per voxel keeps offsets computable; a packed layout can
use a future version number.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from os import PathLike
from typing import Sequence

import numpy as np

from .errors import ConnvoxError
from .grid import VoxelGrid

__all__ = [
    "VoxelFileHeader",
    "DatasetIOError",
    "BadMagicError",
    "TruncationError",
    "InvalidVoxelByteError",
    "IncompatibleSamplesError",
    "HEADER_SIZE",
    "MAGIC",
    "VERSION",
    "write_dataset",
    "read_dataset",
    "read_header",
    "sample_offset",
]

MAGIC = b"VXG1"
VERSION = 1
_HEADER_STRUCT = struct.Struct("<4sHHHHHQ")
HEADER_SIZE = _HEADER_STRUCT.size  # 22 bytes


class DatasetIOError(ConnvoxError):
    """Base class for voxel-file parse/write errors."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class BadMagicError(DatasetIOError):
    pass


class TruncationError(DatasetIOError):
    def __init__(self, message: str, offset: int, expected: int, actual: int):
        super().__init__(f"{message}: expected {expected} bytes, got {actual}", offset)
        self.expected = expected
        self.actual = actual


class InvalidVoxelByteError(DatasetIOError):
    pass


class IncompatibleSamplesError(ConnvoxError):
    pass


@dataclass(frozen=True)
class VoxelFileHeader:
    version: int
    channels: int
    dims: tuple[int, int, int]
    sample_count: int

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")
        if min(self.dims) < 1:
            raise ValueError(f"dims must be >= 1, got {self.dims}")

    @property
    def sample_bytes(self) -> int:
        dx, dy, dz = self.dims
        return self.channels * dx * dy * dz

    def pack(self) -> bytes:
        return _HEADER_STRUCT.pack(
            MAGIC, self.version, self.channels, *self.dims, self.sample_count
        )

    @classmethod
    def unpack(cls, raw: bytes) -> "VoxelFileHeader":
        if len(raw) < HEADER_SIZE:
            raise TruncationError("truncated header", 0, HEADER_SIZE, len(raw))
        magic, version, channels, dx, dy, dz, count = _HEADER_STRUCT.unpack(raw[:HEADER_SIZE])
        if magic != MAGIC:
            raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
        try:
            return cls(version, channels, (dx, dy, dz), count)
        except ValueError as exc:
            raise DatasetIOError(str(exc), 4) from exc


def sample_offset(header: VoxelFileHeader, index: int) -> int:
    return HEADER_SIZE + index * header.sample_bytes


def _open_sink(sink):
    if isinstance(sink, (str, PathLike)):
        return open(sink, "wb"), True
    return sink, False


def write_dataset(samples: Sequence[VoxelGrid], sink) -> int:
    """Write samples after a header; returns the byte count. Output is byte-identical
    for identical input."""
    samples = list(samples)
    if samples:
        dims = samples[0].dims
        channels = samples[0].channels
        for i, grid in enumerate(samples):
            if grid.dims != dims or grid.channels != channels:
                raise IncompatibleSamplesError(
                    f"sample {i} has shape {grid.channels}x{grid.dims}, "
                    f"expected {channels}x{dims}"
                )
    else:
        dims, channels = (1, 1, 1), 1
    header = VoxelFileHeader(VERSION, channels, dims, len(samples))
    fh, owned = _open_sink(sink)
    try:
        written = fh.write(header.pack())
        for grid in samples:
            written += fh.write(grid.data.tobytes())
    finally:
        if owned:
            fh.close()
    return written


def read_header(source) -> VoxelFileHeader:
    if isinstance(source, (str, PathLike)):
        with open(source, "rb") as fh:
            return VoxelFileHeader.unpack(fh.read(HEADER_SIZE))
    if isinstance(source, (bytes, bytearray)):
        return VoxelFileHeader.unpack(bytes(source[:HEADER_SIZE]))
    return VoxelFileHeader.unpack(source.read(HEADER_SIZE))


def read_dataset(source, start: int = 0, stop: int | None = None) -> list[VoxelGrid]:
    """Exact inverse of write_dataset; [start, stop) selects a sample range.

    Path sources are read by seeking, so a range never loads the whole file.
    """
    if isinstance(source, (str, PathLike)):
        with open(source, "rb") as fh:
            return _read_from_file(fh, start, stop)
    if isinstance(source, (bytes, bytearray)):
        import io as _io

        return _read_from_file(_io.BytesIO(bytes(source)), start, stop)
    return _read_from_file(source, start, stop)


def _read_from_file(fh, start: int, stop: int | None) -> list[VoxelGrid]:
    header = VoxelFileHeader.unpack(fh.read(HEADER_SIZE))
    payload_expected = header.sample_count * header.sample_bytes
    fh.seek(0, 2)
    actual_payload = fh.tell() - HEADER_SIZE
    if actual_payload != payload_expected:
        raise TruncationError(
            "payload length mismatch", HEADER_SIZE, payload_expected, actual_payload
        )
    if stop is None:
        stop = header.sample_count
    start = max(0, start)
    stop = min(stop, header.sample_count)
    grids: list[VoxelGrid] = []
    shape = (header.channels, *header.dims)
    for i in range(start, stop):
        lo = sample_offset(header, i)
        fh.seek(lo)
        raw = np.frombuffer(fh.read(header.sample_bytes), dtype=np.uint8)
        bad = np.flatnonzero(raw > 1)
        if bad.size:
            raise InvalidVoxelByteError(
                f"voxel byte {raw[bad[0]]} is not 0 or 1", lo + int(bad[0])
            )
        grids.append(VoxelGrid(raw.reshape(shape).copy()))
    return grids
