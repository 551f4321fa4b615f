"""Lattice-point counting inside convex hulls of point sets.

The denominator of the convexity ratio: how many integer lattice points lie
inside (or on) the convex hull of a voxel set. Affinely degenerate inputs
(coplanar, collinear, single point) fall back to the lower-dimensional hull,
counting lattice points on it.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull

from .grid import Point3

__all__ = ["convex_hull_lattice_count"]

_TOL = 1e-9


def _as_points(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points.astype(float)
    else:
        pts = list(points)
        if pts and isinstance(pts[0], Point3):
            arr = np.array([[p.x, p.y, p.z] for p in pts], dtype=float)
        else:
            arr = np.array(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected points of shape (n, 3), got {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("need at least one point")
    return np.unique(arr, axis=0)


def _lattice_candidates(points: np.ndarray) -> np.ndarray:
    lo = np.ceil(points.min(axis=0) - _TOL).astype(int)
    hi = np.floor(points.max(axis=0) + _TOL).astype(int)
    if (lo > hi).any():
        return np.empty((0, 3), dtype=int)
    grids = np.meshgrid(*(np.arange(l, h + 1) for l, h in zip(lo, hi)), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def convex_hull_lattice_count(points) -> int:
    """Count integer lattice points inside or on the convex hull of `points`."""
    pts = _as_points(points)
    centered = pts - pts[0]
    rank = np.linalg.matrix_rank(centered, tol=1e-8) if len(pts) > 1 else 0
    cand = _lattice_candidates(pts)
    if len(cand) == 0:
        return 0
    if rank == 0:
        return int(np.all(np.abs(pts[0] - np.round(pts[0])) <= _TOL))
    if rank == 3:
        hull = ConvexHull(pts)
        eq = hull.equations  # rows (a, b) with a.x + b <= 0 inside
        inside = (cand @ eq[:, :3].T + eq[:, 3] <= _TOL).all(axis=1)
        return int(inside.sum())
    # degenerate: work inside the affine span
    _, _, vt = np.linalg.svd(centered, full_matrices=True)
    basis = vt[:rank]
    normal_basis = vt[rank:]
    rel = cand - pts[0]
    on_span = (np.abs(rel @ normal_basis.T) <= _TOL).all(axis=1)
    cand = cand[on_span]
    if len(cand) == 0:
        return 0
    proj_pts = centered @ basis.T
    proj_cand = (cand - pts[0]) @ basis.T
    if rank == 1:
        lo, hi = proj_pts.min(), proj_pts.max()
        t = proj_cand[:, 0]
        return int(((t >= lo - _TOL) & (t <= hi + _TOL)).sum())
    hull2 = ConvexHull(proj_pts)
    eq = hull2.equations
    inside = (proj_cand @ eq[:, :2].T + eq[:, 2] <= _TOL).all(axis=1)
    return int(inside.sum())
