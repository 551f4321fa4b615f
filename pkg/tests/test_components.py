import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from connvox import VoxelGrid, label_components
from connvox.components import label_mask

from oracles import flood_fill_components, flood_fill_sizes


def _grid_from_mask(mask):
    return VoxelGrid(mask[np.newaxis].astype(np.uint8))


def test_empty_grid_has_zero_components():
    lab = label_components(VoxelGrid.empty((4, 4, 4)))
    assert lab.count == 0
    assert lab.component_sizes == ()
    assert lab.label_map.max() == 0


def test_single_voxel():
    mask = np.zeros((4, 4, 4), bool)
    mask[1, 2, 3] = True
    lab = label_components(_grid_from_mask(mask))
    assert lab.count == 1
    assert lab.component_sizes == (1,)


def test_diagonal_pair_connectivity():
    mask = np.zeros((4, 4, 4), bool)
    mask[0, 0, 0] = True
    mask[1, 1, 1] = True
    grid = _grid_from_mask(mask)
    assert label_components(grid, connectivity=26).count == 1
    assert label_components(grid, connectivity=6).count == 2


def test_labels_dense_and_size_ordered():
    mask = np.zeros((6, 6, 6), bool)
    mask[0, 0, 0:3] = True  # size 3
    mask[3, 3, 3] = True  # size 1
    mask[5, 0:2, 0] = True  # size 2
    lab = label_components(_grid_from_mask(mask))
    assert lab.component_sizes == (3, 2, 1)
    assert sorted(np.unique(lab.label_map[lab.label_map > 0])) == [1, 2, 3]
    assert lab.label_map[0, 0, 0] == 1
    assert lab.label_map[5, 0, 0] == 2
    assert lab.label_map[3, 3, 3] == 3


def test_size_ties_broken_by_linear_index():
    mask = np.zeros((4, 4, 4), bool)
    mask[3, 3, 3] = True
    mask[0, 0, 1] = True
    lab = label_components(_grid_from_mask(mask))
    # (0,0,1) has linear index 1 < 63, so it takes label 1
    assert lab.label_map[0, 0, 1] == 1
    assert lab.label_map[3, 3, 3] == 2


def test_sizes_sum_to_foreground():
    rng = np.random.default_rng(11)
    for _ in range(50):
        mask = rng.random((6, 6, 6)) < rng.uniform(0.2, 0.8)
        lab = label_mask(mask, 26)
        assert sum(lab.component_sizes) == mask.sum()


@pytest.mark.parametrize("connectivity", [6, 18, 26])
def test_matches_flood_fill_oracle_random(connectivity):
    rng = np.random.default_rng(connectivity)
    for _ in range(300):
        dims = tuple(rng.integers(1, 7, size=3))
        mask = rng.random(dims) < rng.uniform(0.1, 0.9)
        lab = label_mask(mask, connectivity)
        oracle = flood_fill_components(mask, connectivity)
        assert lab.count == len(oracle)
        assert list(lab.component_sizes) == flood_fill_sizes(mask, connectivity)
        # same-label voxels must form exactly the oracle's partition
        got = {}
        for v in map(tuple, np.argwhere(mask)):
            got.setdefault(lab.label_map[v], set()).add(v)
        assert set(map(frozenset, got.values())) == set(map(frozenset, oracle))


@given(st.integers(0, 2**32 - 1), st.sampled_from([6, 18, 26]))
@settings(max_examples=60, deadline=None)
def test_label_partition_matches_oracle_hypothesis(seed, connectivity):
    rng = np.random.default_rng(seed)
    mask = rng.random(tuple(rng.integers(1, 6, size=3))) < rng.uniform(0.0, 1.0)
    lab = label_mask(mask, connectivity)
    assert lab.count == len(flood_fill_components(mask, connectivity))
    assert sum(lab.component_sizes) == mask.sum()
