"""Binary voxel grids and the lattice primitives built directly on them.

Grids are immutable multi-channel occupancy lattices. Channel 0 holds the
main volume; channel 1, when present, holds subspheres. Voxel centers sit at
integer coordinates, so a grid of dims (dx, dy, dz) spans voxel centers
(0..dx-1, 0..dy-1, 0..dz-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterable, NamedTuple

import numpy as np

from .errors import EmptyRasterizationError, UnsupportedRotationError

__all__ = [
    "Point3",
    "VoxelGrid",
    "LatticeRotation",
    "PROPER_ROTATIONS",
    "rasterize_ellipsoid",
    "rotate_grid_90",
]


@dataclass(frozen=True)
class Point3:
    """Continuous point in voxel units (voxel centers at integer coordinates)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"Point3 components must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


class VoxelGrid:
    """Immutable binary occupancy lattice with one or more channels.

    Data layout is (channel, x, y, z) with values exactly 0 or 1. The linear
    voxel index used for deterministic tie-breaking is the C-order flat index
    within a channel: (x * dy + y) * dz + z.
    """

    __slots__ = ("_data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data)
        if arr.ndim != 4:
            raise ValueError(f"expected (channels, dx, dy, dz) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or min(arr.shape[1:]) < 1:
            raise ValueError(f"channels and dims must be >= 1, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("voxel values must be exactly 0 or 1")
            arr = arr.astype(np.uint8)
        elif arr.max(initial=0) > 1:
            raise ValueError("voxel values must be exactly 0 or 1")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "_data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("VoxelGrid is immutable")

    @classmethod
    def empty(cls, dims: tuple[int, int, int], channels: int = 1) -> "VoxelGrid":
        return cls(np.zeros((channels, *dims), dtype=np.uint8))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._data.shape[1:]

    @property
    def channels(self) -> int:
        return self._data.shape[0]

    def channel(self, index: int) -> np.ndarray:
        return self._data[index]

    def foreground_count(self, channel: int = 0) -> int:
        return int(self._data[channel].sum())

    def with_channel(self, index: int, values: np.ndarray) -> "VoxelGrid":
        """Return a new grid with one channel replaced."""
        new = self._data.copy()
        new[index] = values
        return VoxelGrid(new)

    def __eq__(self, other) -> bool:
        return isinstance(other, VoxelGrid) and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self._data.shape, self._data.tobytes()))

    def __repr__(self):
        return f"VoxelGrid(channels={self.channels}, dims={self.dims})"


def ellipsoid_mask(
    dims: tuple[int, int, int],
    center: Point3 | Iterable[float],
    radii: tuple[float, float, float],
) -> np.ndarray:
    """Boolean mask of voxel centers p with sum(((p-c)/r)^2) <= 1, clipped to dims."""
    c = center.as_array() if isinstance(center, Point3) else np.asarray(center, dtype=float)
    r = np.asarray(radii, dtype=float)
    if (r <= 0).any():
        raise ValueError(f"radii must be positive, got {tuple(r)}")
    mask = np.zeros(dims, dtype=bool)
    lo = np.maximum(np.ceil(c - r).astype(int), 0)
    hi = np.minimum(np.floor(c + r).astype(int), np.asarray(dims) - 1)
    if (lo > hi).any():
        return mask
    xs = np.arange(lo[0], hi[0] + 1)
    ys = np.arange(lo[1], hi[1] + 1)
    zs = np.arange(lo[2], hi[2] + 1)
    fx = ((xs - c[0]) / r[0]) ** 2
    fy = ((ys - c[1]) / r[1]) ** 2
    fz = ((zs - c[2]) / r[2]) ** 2
    inside = fx[:, None, None] + fy[None, :, None] + fz[None, None, :] <= 1.0
    mask[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1, lo[2] : hi[2] + 1] = inside
    return mask


def rasterize_ellipsoid(
    center: Point3,
    radii: tuple[float, float, float],
    grid: VoxelGrid,
    channel: int = 0,
) -> VoxelGrid:
    """Set voxels of one channel inside an axis-aligned ellipsoid; all other voxels unchanged.

    Raises EmptyRasterizationError when no voxel center falls inside the shape.
    """
    dims = grid.dims
    c = center.as_array()
    if (c < 0).any() or (c > np.asarray(dims) - 1).any():
        raise ValueError(f"center {center} outside grid bounds {dims}")
    mask = ellipsoid_mask(dims, c, radii)
    if not mask.any():
        raise EmptyRasterizationError(
            f"ellipsoid at {tuple(c)} with radii {tuple(radii)} covers no voxel centers"
        )
    updated = grid.channel(channel) | mask.astype(np.uint8)
    return grid.with_channel(channel, updated)


class LatticeRotation(NamedTuple):
    """A proper rotation of the cubic lattice as a signed permutation matrix.

    The matrix maps centered old coordinates to centered new coordinates
    (new = M @ old about the cube center), so composition and inversion are
    ordinary matrix algebra.
    """

    rows: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=int)

    def inverse(self) -> "LatticeRotation":
        return LatticeRotation(tuple(map(tuple, self.matrix().T)))

    def compose(self, other: "LatticeRotation") -> "LatticeRotation":
        """Rotation equivalent to applying `other` first, then self."""
        return LatticeRotation(tuple(map(tuple, self.matrix() @ other.matrix())))


def _proper_rotations() -> tuple[LatticeRotation, ...]:
    rotations = []
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            m = np.zeros((3, 3), dtype=int)
            for row, (col, sign) in enumerate(zip(perm, signs)):
                m[row, col] = sign
            if round(np.linalg.det(m)) == 1:
                rotations.append(LatticeRotation(tuple(map(tuple, m))))
    identity = tuple(map(tuple, np.eye(3, dtype=int)))
    rotations.sort(key=lambda rot: rot.rows != identity)
    return tuple(rotations)


PROPER_ROTATIONS: tuple[LatticeRotation, ...] = _proper_rotations()


def rotate_grid_90(grid: VoxelGrid, rotation: LatticeRotation) -> VoxelGrid:
    """Permute occupancy of a cubic grid by one of the 24 proper cube rotations."""
    dx, dy, dz = grid.dims
    if not (dx == dy == dz):
        raise UnsupportedRotationError(f"lattice rotations need a cubic grid, got {grid.dims}")
    # transpose with `perm` then flip realizes exactly new = M @ old (about the
    # cube center) when perm[row] is the nonzero column of M's row.
    m = rotation.matrix()
    perm = [0, 0, 0]
    flips = [False, False, False]
    for row in range(3):
        col = int(np.flatnonzero(m[row])[0])
        perm[row] = col
        flips[row] = m[row, col] < 0
    out = np.transpose(grid.data, (0, perm[0] + 1, perm[1] + 1, perm[2] + 1))
    flip_axes = [i + 1 for i, f in enumerate(flips) if f]
    if flip_axes:
        out = np.flip(out, axis=flip_axes)
    return VoxelGrid(np.ascontiguousarray(out))
