"""Euclidean distance transform over voxel channels."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import EmptyInputError
from .grid import VoxelGrid

__all__ = ["distance_transform"]


def distance_transform(grid: VoxelGrid, channel: int = 0) -> np.ndarray:
    """Exact Euclidean distance from each foreground voxel to the nearest background voxel center.

    Out-of-bounds voxels count as background, so a foreground voxel on the
    grid boundary reports distance 1. Background voxels report 0.
    """
    mask = grid.channel(channel).astype(bool)
    return distance_field(mask)


def distance_field(mask: np.ndarray) -> np.ndarray:
    """distance_transform on a bare boolean array (internal fast path)."""
    if not mask.any():
        raise EmptyInputError("distance transform needs at least one foreground voxel")
    padded = np.pad(mask, 1)
    field = ndimage.distance_transform_edt(padded)
    return field[1:-1, 1:-1, 1:-1]
