import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from connvox import (
    ConnLossInput,
    PackedVolumeConfig,
    VoxelGrid,
    component_counts_for_loss,
    connection_loss,
    gen_connected_volume,
    gen_packed_volume,
    ConnectedVolumeConfig,
)
from connvox.errors import InvalidBatchError, MissingGroundTruthError


def test_single_object_worked_example():
    # two samples, counts 2 and 1: 1/2 * [(|2-1| - 0) + (|1-1| - 1)] = 0
    loss = connection_loss(ConnLossInput(((2,), (1,)), lambda3=1.0))
    assert loss == pytest.approx(0.0, abs=1e-12)


def test_multi_object_worked_example():
    # two samples with two expected objects, counts [1,1] and [1,2]:
    # 1/2 * [(sqrt(0) - 2) + (sqrt(1/2) - 1)] = -1.146447
    loss = connection_loss(ConnLossInput(((1, 1), (1, 2)), lambda3=1.0))
    assert loss == pytest.approx(0.5 * (-2.0 + (math.sqrt(0.5) - 1.0)), abs=1e-12)
    assert loss == pytest.approx(-1.146447, abs=1e-6)


def test_fully_connected_single_sample():
    assert connection_loss(ConnLossInput(((1,),), 1.0)) == -1.0


def test_single_object_minimum_only_at_one():
    lam = 1.0
    values = {cc: connection_loss(ConnLossInput(((cc,),), lam)) for cc in range(0, 8)}
    assert min(values.values()) == values[1] == -lam
    assert all(v > -lam for cc, v in values.items() if cc != 1)


def test_multi_object_minimum_only_at_all_ones():
    lam = 1.0
    k = 3
    best = connection_loss(ConnLossInput(((1,) * k,), lam))
    assert best == -lam * k
    for vec in [(0, 1, 1), (2, 1, 1), (1, 2, 2), (3, 3, 3)]:
        assert connection_loss(ConnLossInput((vec,), lam)) > best


@given(
    st.lists(st.integers(0, 6), min_size=2, max_size=6).flatmap(
        lambda proto: st.lists(
            st.lists(st.integers(0, 6), min_size=len(proto), max_size=len(proto)),
            min_size=1,
            max_size=8,
        )
    ),
    st.integers(0, 10**6),
)
@settings(max_examples=80, deadline=None)
def test_permutation_invariance(counts, seed):
    rng = np.random.default_rng(seed)
    batch = tuple(tuple(vec) for vec in counts)
    base = connection_loss(ConnLossInput(batch, 1.0))
    shuffled_samples = tuple(batch[i] for i in rng.permutation(len(batch)))
    assert connection_loss(ConnLossInput(shuffled_samples, 1.0)) == pytest.approx(base, abs=1e-12)
    shuffled_objects = tuple(tuple(rng.permutation(vec).tolist()) for vec in batch)
    assert connection_loss(ConnLossInput(shuffled_objects, 1.0)) == pytest.approx(base, abs=1e-12)


@given(st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=1), min_size=1, max_size=12))
@settings(max_examples=60, deadline=None)
def test_lambda_zero_nonnegative_and_zero_iff_connected(counts):
    batch = tuple(tuple(v) for v in counts)
    loss = connection_loss(ConnLossInput(batch, lambda3=0.0))
    assert loss >= 0.0
    if all(v[0] == 1 for v in batch):
        assert loss == 0.0
    else:
        assert loss > 0.0


def test_mixed_expected_objects_rejected():
    with pytest.raises(InvalidBatchError):
        ConnLossInput(((1,), (1, 2)), 1.0)


def test_negative_counts_rejected():
    with pytest.raises(InvalidBatchError):
        ConnLossInput(((-1,),), 1.0)


def test_empty_batch_rejected():
    with pytest.raises(InvalidBatchError):
        ConnLossInput((), 1.0)


# --- mapping samples to count vectors ---------------------------------------


def test_counts_single_object_ball():
    grid = gen_connected_volume(ConnectedVolumeConfig(), 5)
    assert component_counts_for_loss(grid) == (1,)


def test_counts_empty_channel_zero():
    assert component_counts_for_loss(VoxelGrid.empty((8, 8, 8))) == (0,)


def test_counts_packed_sample_all_ones():
    for seed in range(10):
        grid, isos = gen_packed_volume(PackedVolumeConfig(), seed)
        assert component_counts_for_loss(grid, isos) == (1,) * 7


def test_counts_packed_detects_missing_and_split():
    grid, isos = gen_packed_volume(PackedVolumeConfig(), 3)
    sub = grid.channel(1).copy()
    # erase the subsphere nearest the first ground-truth center
    from connvox.components import label_mask

    labeling = label_mask(sub.astype(bool), 26)
    centers = isos.centers_array()
    target = isos.centers[0].as_array()
    for label in range(1, 8):
        centroid = np.argwhere(labeling.component_mask(label)).mean(axis=0)
        if np.linalg.norm(centroid - target) < 1.0:
            sub[labeling.component_mask(label)] = 0
            break
    broken = VoxelGrid(np.stack([grid.channel(0), sub]))
    counts = component_counts_for_loss(broken, isos)
    assert counts[0] == 0
    assert counts[1:] == (1,) * 6


def test_counts_packed_requires_two_channels():
    grid = gen_connected_volume(ConnectedVolumeConfig(), 5)
    with pytest.raises(MissingGroundTruthError):
        component_counts_for_loss(grid, ground_truth_stub())


def ground_truth_stub():
    from connvox import IsocenterSet, Point3

    return IsocenterSet((Point3(4, 4, 4),), (1.0,))


def test_counts_leftover_assigned_to_nearest_center():
    from connvox import IsocenterSet, Point3

    data = np.zeros((2, 12, 12, 12), np.uint8)
    data[0] = 1
    data[1, 2, 2, 2] = 1  # inside region A
    data[1, 9, 9, 9] = 1  # inside region B
    data[1, 5, 2, 2] = 1  # leftover, nearer center A
    gt = IsocenterSet((Point3(2, 2, 2), Point3(9, 9, 9)), (1.5, 1.5))
    counts = component_counts_for_loss(VoxelGrid(data), gt)
    assert counts == (2, 1)
