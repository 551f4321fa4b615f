"""Per-shape statistics shared by the metrics suite and the generators."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import EmptyInputError
from .hull import convex_hull_lattice_count

__all__ = ["points_connectivity_ratio", "mask_convexity_ratio"]


def points_connectivity_ratio(points: np.ndarray) -> float:
    """Fraction of points within mean + 2*std of the centroid distance (single pass)."""
    center = points.mean(axis=0)
    dists = np.linalg.norm(points - center, axis=1)
    cut = dists.mean() + 2.0 * dists.std()
    return float((dists <= cut).sum() / len(points))


def mask_convexity_ratio(mask: np.ndarray) -> float:
    """Foreground count over the lattice-point count of the foreground's convex hull."""
    size = int(mask.sum())
    if size == 0:
        raise EmptyInputError("no foreground voxels")
    # the hull of the 6-boundary equals the hull of the full set; far fewer points
    boundary = mask & ~ndimage.binary_erosion(mask)
    hull_count = convex_hull_lattice_count(np.argwhere(boundary).astype(float))
    return size / hull_count
