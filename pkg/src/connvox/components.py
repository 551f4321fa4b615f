"""Connected-component labeling of voxel channels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import VoxelGrid

__all__ = ["ComponentLabeling", "label_components", "CONNECTIVITIES"]

CONNECTIVITIES = (6, 18, 26)

_STRUCTURES = {
    6: ndimage.generate_binary_structure(3, 1),
    18: ndimage.generate_binary_structure(3, 2),
    26: ndimage.generate_binary_structure(3, 3),
}


@dataclass(frozen=True)
class ComponentLabeling:
    """Dense per-voxel labels (0 = background) plus per-component voxel counts.

    Labels are 1..K ordered by descending size; ties broken by the smallest
    linear voxel index (x * dy + y) * dz + z of the component.
    """

    label_map: np.ndarray
    component_sizes: tuple[int, ...]
    connectivity: int

    @property
    def count(self) -> int:
        return len(self.component_sizes)

    def component_mask(self, label: int) -> np.ndarray:
        return self.label_map == label


def label_components(grid: VoxelGrid, channel: int = 0, connectivity: int = 26) -> ComponentLabeling:
    """Label the connected components of one channel.

    An empty channel yields zero components.
    """
    if connectivity not in _STRUCTURES:
        raise ValueError(f"connectivity must be one of {CONNECTIVITIES}, got {connectivity}")
    mask = grid.channel(channel).astype(bool)
    return label_mask(mask, connectivity)


def label_mask(mask: np.ndarray, connectivity: int = 26) -> ComponentLabeling:
    """label_components on a bare boolean array (internal fast path)."""
    raw, n = ndimage.label(mask, structure=_STRUCTURES[connectivity])
    if n == 0:
        return ComponentLabeling(raw.astype(np.int32), (), connectivity)
    flat = raw.ravel()
    sizes = np.bincount(flat, minlength=n + 1)[1:]
    # first occurrence in C-order is the minimum linear voxel index
    nz = np.flatnonzero(flat)
    labels_sorted, first_pos = np.unique(flat[nz], return_index=True)
    first_index = np.empty(n, dtype=np.int64)
    first_index[labels_sorted - 1] = nz[first_pos]
    order = sorted(range(n), key=lambda i: (-sizes[i], first_index[i]))
    remap = np.zeros(n + 1, dtype=np.int32)
    for new_label, old_idx in enumerate(order, start=1):
        remap[old_idx + 1] = new_label
    label_map = remap[raw]
    sorted_sizes = tuple(int(sizes[i]) for i in order)
    return ComponentLabeling(label_map, sorted_sizes, connectivity)
