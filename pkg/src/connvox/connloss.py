"""Connection loss: the component-count penalty added to a generator's loss.

Two batch-homogeneous cases. With one expected object per sample, each sample
contributes |CC - 1| - lam3*[CC = 1]. With K >= 2 expected objects, each
sample contributes sqrt(mean_i (CC[i] - 1)^2) - lam3 * sum_i [CC[i] = 1].
The batch loss is the mean over samples; [.] is the Iverson bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .components import label_mask
from .errors import InvalidBatchError, MissingGroundTruthError
from .grid import VoxelGrid, ellipsoid_mask
from .shapegen import IsocenterSet

__all__ = ["ConnLossInput", "connection_loss", "component_counts_for_loss"]


@dataclass(frozen=True)
class ConnLossInput:
    """A batch of per-sample component-count vectors with the reward weight lam3.

    Every sample must carry the same number of expected objects; mixing the
    single-object and multi-object cases in one batch is invalid.
    """

    counts: tuple[tuple[int, ...], ...]
    lambda3: float = 1.0

    def __post_init__(self):
        if len(self.counts) < 1:
            raise InvalidBatchError("batch must contain at least one sample")
        k = len(self.counts[0])
        if k < 1:
            raise InvalidBatchError("each sample needs at least one component count")
        for i, vec in enumerate(self.counts):
            if len(vec) != k:
                raise InvalidBatchError(
                    f"sample {i} has {len(vec)} expected objects, batch started with {k}"
                )
            if any(c < 0 or int(c) != c for c in vec):
                raise InvalidBatchError(f"sample {i} has non-integer or negative counts {vec}")
        if self.lambda3 < 0:
            raise InvalidBatchError(f"lambda3 must be >= 0, got {self.lambda3}")

    @property
    def expected_objects(self) -> int:
        return len(self.counts[0])


def connection_loss(batch: ConnLossInput) -> float:
    """Mean connection-loss over the batch; exact apart from the square root."""
    lam = batch.lambda3
    k = batch.expected_objects
    terms = []
    for vec in batch.counts:
        if k == 1:
            cc = vec[0]
            terms.append(abs(cc - 1) - lam * (1.0 if cc == 1 else 0.0))
        else:
            rmse = math.sqrt(sum((c - 1) ** 2 for c in vec) / k)
            reward = lam * sum(1 for c in vec if c == 1)
            terms.append(rmse - reward)
    return math.fsum(terms) / len(terms)


def component_counts_for_loss(
    grid: VoxelGrid,
    ground_truth: IsocenterSet | None = None,
    connectivity: int = 26,
) -> tuple[int, ...]:
    """Map one sample to its component-count vector.

    Without ground truth, the vector is the single component count of channel
    0. With ground truth, each subsphere's count is the number of channel-1
    components inside its ball region, plus the components of leftover
    channel-1 foreground assigned to it by nearest ground-truth center.
    """
    if ground_truth is None:
        return (label_mask(grid.channel(0).astype(bool), connectivity).count,)
    if grid.channels < 2:
        raise MissingGroundTruthError(
            "multi-object counting needs a 2-channel grid with subspheres on channel 1"
        )
    dims = grid.dims
    sub = grid.channel(1).astype(bool)
    regions = []
    for point, r in zip(ground_truth.centers, ground_truth.radii):
        regions.append(ellipsoid_mask(dims, point, (r, r, r)))
    counts = [label_mask(sub & region, connectivity).count for region in regions]
    leftover = sub.copy()
    for region in regions:
        leftover &= ~region
    if leftover.any():
        centers = ground_truth.centers_array()
        voxels = np.argwhere(leftover)
        dist = ((voxels[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        nearest = dist.argmin(axis=1)  # ties resolve to the smaller index
        for i in range(len(regions)):
            part = np.zeros(dims, dtype=bool)
            chosen = voxels[nearest == i]
            if len(chosen) == 0:
                continue
            part[tuple(chosen.T)] = True
            counts[i] += label_mask(part, connectivity).count
    return tuple(counts)
