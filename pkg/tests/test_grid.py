import numpy as np
import pytest

from connvox import (
    PROPER_ROTATIONS,
    Point3,
    VoxelGrid,
    rasterize_ellipsoid,
    rotate_grid_90,
)
from connvox.errors import EmptyRasterizationError, UnsupportedRotationError

from oracles import lattice_points_in_ellipsoid


def test_grid_values_validated():
    with pytest.raises(ValueError):
        VoxelGrid(np.full((1, 2, 2, 2), 3, dtype=np.uint8))
    with pytest.raises(ValueError):
        VoxelGrid(np.zeros((2, 2, 2), dtype=np.uint8))


def test_grid_is_immutable():
    g = VoxelGrid.empty((4, 4, 4))
    with pytest.raises(ValueError):
        g.data[0, 0, 0, 0] = 1
    with pytest.raises(AttributeError):
        g.data = None


def test_point3_requires_finite():
    with pytest.raises(ValueError):
        Point3(0.0, float("nan"), 0.0)


def test_rasterize_single_voxel():
    g = rasterize_ellipsoid(Point3(8, 8, 8), (0.6, 0.6, 0.6), VoxelGrid.empty((16, 16, 16)))
    assert g.foreground_count() == 1
    assert g.channel(0)[8, 8, 8] == 1


def test_rasterize_unit_ball_is_face_neighborhood():
    g = rasterize_ellipsoid(Point3(8, 8, 8), (1.0, 1.0, 1.0), VoxelGrid.empty((16, 16, 16)))
    assert g.foreground_count() == lattice_points_in_ellipsoid((16,) * 3, (8, 8, 8), (1, 1, 1))
    assert g.foreground_count() == 7


def test_rasterize_ball_radius5(ball_r5):
    expected = lattice_points_in_ellipsoid((16,) * 3, (8, 8, 8), (5, 5, 5))
    assert expected == 515
    assert ball_r5.foreground_count() == expected


def test_rasterize_matches_enumeration_for_random_ellipsoids():
    rng = np.random.default_rng(3)
    for _ in range(20):
        radii = rng.uniform(0.8, 6.0, size=3)
        center = rng.uniform(3, 12, size=3)
        g = rasterize_ellipsoid(Point3(*center), tuple(radii), VoxelGrid.empty((16, 16, 16)))
        assert g.foreground_count() == lattice_points_in_ellipsoid((16,) * 3, center, radii)


def test_rasterize_preserves_other_voxels():
    base = rasterize_ellipsoid(Point3(2, 2, 2), (1, 1, 1), VoxelGrid.empty((16, 16, 16)))
    both = rasterize_ellipsoid(Point3(12, 12, 12), (1, 1, 1), base)
    assert both.foreground_count() == 14
    assert both.channel(0)[2, 2, 2] == 1


def test_rasterize_empty_raises():
    with pytest.raises(EmptyRasterizationError):
        rasterize_ellipsoid(Point3(8.5, 8.5, 8.5), (0.2, 0.2, 0.2), VoxelGrid.empty((16, 16, 16)))


def test_rasterize_center_out_of_bounds():
    with pytest.raises(ValueError):
        rasterize_ellipsoid(Point3(20, 8, 8), (1, 1, 1), VoxelGrid.empty((16, 16, 16)))


def test_rotations_are_24_unique_proper():
    assert len(PROPER_ROTATIONS) == 24
    assert len({rot.rows for rot in PROPER_ROTATIONS}) == 24
    for rot in PROPER_ROTATIONS:
        assert round(np.linalg.det(rot.matrix())) == 1


def test_identity_rotation_is_first():
    g = VoxelGrid((np.random.default_rng(0).random((1, 4, 4, 4)) < 0.5).astype(np.uint8))
    assert rotate_grid_90(g, PROPER_ROTATIONS[0]) == g


def test_rotation_preserves_counts_and_inverts():
    rng = np.random.default_rng(5)
    g = VoxelGrid((rng.random((2, 6, 6, 6)) < 0.4).astype(np.uint8))
    for rot in PROPER_ROTATIONS:
        rotated = rotate_grid_90(g, rot)
        assert rotated.foreground_count(0) == g.foreground_count(0)
        assert rotated.foreground_count(1) == g.foreground_count(1)
        assert rotate_grid_90(rotated, rot.inverse()) == g


def test_rotation_requires_cubic():
    g = VoxelGrid.empty((4, 4, 5))
    with pytest.raises(UnsupportedRotationError):
        rotate_grid_90(g, PROPER_ROTATIONS[1])
