import numpy as np
import pytest
from hypothesis import settings

from connvox import Point3, VoxelGrid, rasterize_ellipsoid

settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def ball_r5() -> VoxelGrid:
    """The 515-voxel digitized ball of radius 5 centered at (8,8,8) in 16^3."""
    return rasterize_ellipsoid(Point3(8, 8, 8), (5.0, 5.0, 5.0), VoxelGrid.empty((16, 16, 16)))


def random_mask(rng: np.random.Generator, max_side: int, fill=None) -> np.ndarray:
    dims = tuple(rng.integers(1, max_side + 1, size=3))
    p = rng.uniform(0.15, 0.85) if fill is None else fill
    return rng.random(dims) < p
