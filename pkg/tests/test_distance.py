import numpy as np
import pytest

from connvox import VoxelGrid, distance_transform
from connvox.distance import distance_field
from connvox.errors import EmptyInputError

from oracles import brute_force_edt


def test_single_voxel_distance_one():
    mask = np.zeros((5, 5, 5), bool)
    mask[2, 2, 2] = True
    assert distance_field(mask)[2, 2, 2] == 1.0


def test_solid_cube_center():
    mask = np.zeros((5, 5, 5), bool)
    mask[1:4, 1:4, 1:4] = True
    field = distance_field(mask)
    assert field[2, 2, 2] == 2.0
    others = mask.copy()
    others[2, 2, 2] = False
    assert (field[others] == 1.0).all()


def test_ball_maximum_at_center(ball_r5):
    field = distance_transform(ball_r5, 0)
    assert np.unravel_index(field.argmax(), field.shape) == (8, 8, 8)


def test_boundary_voxels_have_distance_one():
    mask = np.ones((3, 3, 3), bool)
    field = distance_field(mask)
    assert field[0, 0, 0] == 1.0
    assert field[1, 1, 1] == 2.0


def test_background_is_zero():
    mask = np.zeros((4, 4, 4), bool)
    mask[1, 1, 1] = True
    field = distance_field(mask)
    assert field[0, 0, 0] == 0.0


def test_empty_channel_raises():
    with pytest.raises(EmptyInputError):
        distance_transform(VoxelGrid.empty((4, 4, 4)), 0)


def test_matches_brute_force_on_random_grids():
    rng = np.random.default_rng(17)
    for _ in range(60):
        dims = tuple(rng.integers(1, 9, size=3))
        mask = rng.random(dims) < rng.uniform(0.2, 0.9)
        if not mask.any():
            continue
        got = distance_field(mask)
        expected = brute_force_edt(mask)
        assert np.abs(got - expected).max() <= 1e-9
