import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from connvox import VoxelGrid
from connvox.dataset_io import (
    HEADER_SIZE,
    BadMagicError,
    IncompatibleSamplesError,
    InvalidVoxelByteError,
    TruncationError,
    VoxelFileHeader,
    read_dataset,
    read_header,
    sample_offset,
    write_dataset,
)


def _random_grids(seed, count, dims=(4, 3, 5), channels=2):
    rng = np.random.default_rng(seed)
    return [
        VoxelGrid((rng.random((channels, *dims)) < 0.5).astype(np.uint8))
        for _ in range(count)
    ]


def test_header_is_22_bytes_and_round_trips():
    header = VoxelFileHeader(1, 2, (16, 16, 16), 7)
    raw = header.pack()
    assert len(raw) == HEADER_SIZE == 22
    assert raw[:4] == b"VXG1"
    assert VoxelFileHeader.unpack(raw) == header


def test_single_16cube_sample_layout():
    g = VoxelGrid.empty((16, 16, 16))
    buf = io.BytesIO()
    written = write_dataset([g], buf)
    assert written == HEADER_SIZE + 16**3
    assert len(buf.getvalue()) == written


def test_zero_samples_header_only(tmp_path):
    path = tmp_path / "empty.vxg"
    write_dataset([], path)
    assert path.stat().st_size == HEADER_SIZE
    assert read_dataset(path) == []
    assert read_header(path).sample_count == 0


def test_round_trip_identity(tmp_path):
    grids = _random_grids(0, 5)
    path = tmp_path / "d.vxg"
    write_dataset(grids, path)
    back = read_dataset(path)
    assert back == grids


def test_write_is_byte_deterministic():
    grids = _random_grids(1, 3)
    a, b = io.BytesIO(), io.BytesIO()
    write_dataset(grids, a)
    write_dataset(grids, b)
    assert a.getvalue() == b.getvalue()


def test_voxel_byte_order_channel_major_z_fastest():
    data = np.zeros((2, 2, 2, 2), np.uint8)
    data[0, 0, 0, 1] = 1  # linear index 1 within channel 0
    data[1, 1, 0, 0] = 1  # channel 1, x-major index 4
    buf = io.BytesIO()
    write_dataset([VoxelGrid(data)], buf)
    payload = buf.getvalue()[HEADER_SIZE:]
    assert payload[1] == 1
    assert payload[8 + 4] == 1
    assert payload.count(1) == 2


def test_range_read_matches_full_read(tmp_path):
    grids = _random_grids(2, 20)
    path = tmp_path / "r.vxg"
    write_dataset(grids, path)
    assert read_dataset(path, 5, 10) == grids[5:10]
    assert read_dataset(path, 18, 99) == grids[18:]


def test_sample_offset_formula():
    header = VoxelFileHeader(1, 2, (4, 3, 5), 10)
    assert sample_offset(header, 0) == HEADER_SIZE
    assert sample_offset(header, 3) == HEADER_SIZE + 3 * 2 * 4 * 3 * 5


def test_heterogeneous_samples_rejected():
    a = VoxelGrid.empty((4, 4, 4))
    b = VoxelGrid.empty((4, 4, 5))
    with pytest.raises(IncompatibleSamplesError):
        write_dataset([a, b], io.BytesIO())
    c = VoxelGrid.empty((4, 4, 4), channels=2)
    with pytest.raises(IncompatibleSamplesError):
        write_dataset([a, c], io.BytesIO())


def test_bad_magic_reports_offset_zero():
    raw = bytearray(VoxelFileHeader(1, 1, (2, 2, 2), 0).pack())
    raw[:4] = b"NOPE"
    with pytest.raises(BadMagicError) as err:
        read_dataset(bytes(raw))
    assert err.value.offset == 0


def test_truncated_payload_reports_expected_vs_actual():
    grids = _random_grids(3, 2, dims=(2, 2, 2), channels=1)
    buf = io.BytesIO()
    write_dataset(grids, buf)
    raw = buf.getvalue()[:-1]
    with pytest.raises(TruncationError) as err:
        read_dataset(raw)
    assert err.value.expected == 16
    assert err.value.actual == 15


def test_invalid_voxel_byte_names_offset():
    grids = _random_grids(4, 1, dims=(2, 2, 2), channels=1)
    buf = io.BytesIO()
    write_dataset(grids, buf)
    raw = bytearray(buf.getvalue())
    raw[HEADER_SIZE + 3] = 7
    with pytest.raises(InvalidVoxelByteError) as err:
        read_dataset(bytes(raw))
    assert err.value.offset == HEADER_SIZE + 3


@given(
    st.integers(0, 2**32 - 1),
    st.integers(0, 4),
    st.integers(1, 3),
    st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)),
)
@settings(max_examples=60, deadline=None)
def test_round_trip_property(seed, count, channels, dims):
    rng = np.random.default_rng(seed)
    grids = [
        VoxelGrid((rng.random((channels, *dims)) < rng.uniform(0, 1)).astype(np.uint8))
        for _ in range(count)
    ]
    buf = io.BytesIO()
    write_dataset(grids, buf)
    assert read_dataset(buf.getvalue()) == grids
