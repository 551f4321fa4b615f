"""Seeded generators for the four synthetic connected-volume datasets.

Dataset kinds:
  spheres         random spheres/ellipsoids, one connected convex volume
  spheres-packed  the same volumes plus seven predefined subspheres (channel 1)
  tumors          irregular connected blobs matching a target size distribution
  tumors-packed   tumor volumes packed with grassfire subspheres (channel 1)

Every generator is a pure function of (config, seed); sample i of a dataset
uses seed base_seed + i, so generation is order-independent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
import numpy as np

from . import dataset_io
from .components import label_mask
from .distance import distance_field
from .errors import (
    EmptyInputError,
    GenerationFailureError,
    InvalidConfigError,
)
from .grid import Point3, VoxelGrid, ellipsoid_mask
from .shape_stats import points_connectivity_ratio

__all__ = [
    "ShapeSpec",
    "IsocenterSet",
    "SizeDistribution",
    "ConnectedVolumeConfig",
    "PackedVolumeConfig",
    "TumorConfig",
    "PackingConfig",
    "DATASET_KINDS",
    "sample_shape_spec",
    "gen_connected_volume",
    "gen_packed_volume",
    "gen_tumor_volume",
    "pack_isocenters",
    "fill_packed_spheres",
    "generate_sample",
    "gen_dataset",
]

DATASET_KINDS = ("spheres", "spheres-packed", "tumors", "tumors-packed")


@dataclass(frozen=True)
class ShapeSpec:
    """One sampled primitive shape."""

    kind: str  # "sphere" | "ellipsoid" | "tumor"
    center: Point3
    radii: tuple[float, float, float]
    seed: int


@dataclass(frozen=True)
class IsocenterSet:
    """Ordered subsphere centers with radii, plus surface/centroid distances when computed."""

    centers: tuple[Point3, ...]
    radii: tuple[float, ...]
    d_surface: tuple[float, ...] | None = None
    d_center: tuple[float, ...] | None = None
    stop_cause: str | None = None

    def __post_init__(self):
        if len(self.centers) != len(self.radii):
            raise ValueError("centers and radii must align")
        if any(r <= 0 for r in self.radii):
            raise ValueError("isocenter radii must be positive")

    def __len__(self) -> int:
        return len(self.centers)

    def centers_array(self) -> np.ndarray:
        return np.array([[p.x, p.y, p.z] for p in self.centers], dtype=float)


@dataclass(frozen=True)
class SizeDistribution:
    """Target voxel-count distribution for tumor volumes.

    lognormal: exp(Normal(log(median), sigma)); empirical-histogram: draws
    from explicit (sizes, weights). Samples are clamped to [1, max_voxels].
    """

    family: str = "lognormal"
    median: float = 250.0
    sigma: float = 0.35
    histogram_sizes: tuple[float, ...] = ()
    histogram_weights: tuple[float, ...] = ()
    max_voxels: int = 4096

    def sample(self, rng: np.random.Generator) -> float:
        if self.family == "lognormal":
            size = self.median * np.exp(self.sigma * rng.standard_normal())
        elif self.family == "empirical-histogram":
            if not self.histogram_sizes:
                raise InvalidConfigError("empirical-histogram distribution needs histogram_sizes")
            weights = np.asarray(self.histogram_weights, dtype=float)
            weights = weights / weights.sum()
            size = float(rng.choice(self.histogram_sizes, p=weights))
        else:
            raise InvalidConfigError(f"unknown size distribution family {self.family!r}")
        return float(np.clip(size, 1.0, self.max_voxels))


@dataclass(frozen=True)
class ConnectedVolumeConfig:
    dims: tuple[int, int, int] = (16, 16, 16)
    radius_range: tuple[float, float] = (2.0, 7.0)
    sphere_probability: float = 0.5


@dataclass(frozen=True)
class PackedVolumeConfig:
    dims: tuple[int, int, int] = (16, 16, 16)
    # the drawn subsphere radius is r/4 - separation_margin and must stay >= 1,
    # so the range floor sits at 4 * (1 + separation_margin)
    radius_range: tuple[float, float] = (6.0, 7.5)
    sphere_probability: float = 0.5
    separation_margin: float = 0.5
    max_attempts: int = 2000


@dataclass(frozen=True)
class TumorConfig:
    dims: tuple[int, int, int] = (16, 16, 16)
    size_dist: SizeDistribution = field(default_factory=SizeDistribution)
    lobe_count_range: tuple[int, int] = (2, 5)
    primary_scale_range: tuple[float, float] = (0.9, 1.3)
    lobe_scale_range: tuple[float, float] = (0.7, 1.1)
    chain_offset_range: tuple[float, float] = (0.6, 0.9)
    lobe_scale_boost: float = 1.1
    size_tolerance: float = 0.2
    max_attempts: int = 200


@dataclass(frozen=True)
class PackingConfig:
    r_min: float = 1.0
    coverage_target: float = 0.95
    max_isocenters: int = 20


def _check_radius_fits(radius_range, dims):
    half = (min(dims) - 1) / 2.0
    if radius_range[0] < 1.0:
        raise InvalidConfigError(f"minimum radius must be >= 1.0, got {radius_range[0]}")
    if radius_range[0] > radius_range[1]:
        raise InvalidConfigError(f"empty radius range {radius_range}")
    if radius_range[1] > half:
        raise InvalidConfigError(
            f"radius {radius_range[1]} cannot fit dims {dims} (max {half})"
        )


def _sample_primitive(rng, dims, radius_range, sphere_probability) -> tuple[np.ndarray, np.ndarray, str]:
    lo, hi = radius_range
    if rng.random() < sphere_probability:
        kind = "sphere"
        radii = np.full(3, rng.uniform(lo, hi))
    else:
        kind = "ellipsoid"
        radii = rng.uniform(lo, hi, size=3)
    d = np.asarray(dims, dtype=float)
    center = np.array([rng.uniform(r, dd - 1 - r) for r, dd in zip(radii, d)])
    return center, radii, kind


def sample_shape_spec(config: ConnectedVolumeConfig, seed: int) -> ShapeSpec:
    """The primitive shape gen_connected_volume rasterizes for this seed."""
    _check_radius_fits(config.radius_range, config.dims)
    rng = np.random.default_rng(seed)
    center, radii, kind = _sample_primitive(
        rng, config.dims, config.radius_range, config.sphere_probability
    )
    return ShapeSpec(kind, Point3(*center), tuple(float(r) for r in radii), seed)


def gen_connected_volume(config: ConnectedVolumeConfig, seed: int) -> VoxelGrid:
    """One random sphere/ellipsoid volume: a single convex 26-connected component."""
    spec = sample_shape_spec(config, seed)
    mask = ellipsoid_mask(config.dims, spec.center, spec.radii)
    return VoxelGrid(mask[np.newaxis].astype(np.uint8))


def _packed_isocenters(center: np.ndarray, radii: np.ndarray) -> IsocenterSet:
    """Seven subsphere centers: the volume center plus both mid-axis points per axis."""
    centers = [Point3(*center)]
    sub_radii = [float(min(radii)) / 4.0]
    for axis in range(3):
        for sign in (1.0, -1.0):
            offset = np.zeros(3)
            offset[axis] = sign * radii[axis] / 2.0
            centers.append(Point3(*(center + offset)))
            sub_radii.append(float(radii[axis]) / 4.0)
    # canonical order: center, +x, -x, +y, -y, +z, -z
    return IsocenterSet(tuple(centers), tuple(sub_radii))


def gen_packed_volume(config: PackedVolumeConfig, seed: int) -> tuple[VoxelGrid, IsocenterSet]:
    """A sphere/ellipsoid volume with seven predefined subspheres on channel 1.

    Ground-truth isocenters sit at the exact volume center and mid-axis points
    with radii r_k/4. The continuous construction makes neighboring subspheres
    tangent, which on the lattice would fuse them into one component, so the
    drawn balls are shrunk by `separation_margin` and digitizations are
    rejected unless the seven balls stay pairwise separated under
    26-connectivity, inside the main volume, well-formed (no voxel outside the
    2-sigma centroid-distance cut), and with centroids recoverable to within
    half a voxel.
    """
    _check_radius_fits(config.radius_range, config.dims)
    drawn_min = config.radius_range[0] / 4.0 - config.separation_margin
    if drawn_min < 1.0:
        raise InvalidConfigError(
            f"drawn subsphere radius r/4 - {config.separation_margin} must be >= 1.0, "
            f"needs min radius >= {4.0 * (1.0 + config.separation_margin)}, "
            f"got {config.radius_range[0]}"
        )
    rng = np.random.default_rng(seed)
    for _ in range(config.max_attempts):
        center, radii, _ = _sample_primitive(
            rng, config.dims, config.radius_range, config.sphere_probability
        )
        isocenters = _packed_isocenters(center, radii)
        main = ellipsoid_mask(config.dims, center, tuple(radii))
        sub = np.zeros(config.dims, dtype=bool)
        ok = True
        for point, r in zip(isocenters.centers, isocenters.radii):
            drawn = r - config.separation_margin
            ball = ellipsoid_mask(config.dims, point, (drawn, drawn, drawn))
            if not ball.any() or (ball & ~main).any():
                ok = False
                break
            voxels = np.argwhere(ball)
            centroid = voxels.mean(axis=0)
            if np.linalg.norm(centroid - point.as_array()) > 0.5:
                ok = False
                break
            if points_connectivity_ratio(voxels.astype(float)) < 1.0:
                ok = False
                break
            sub |= ball
        if not ok:
            continue
        if label_mask(sub, 26).count != 7:
            continue
        data = np.stack([main, sub]).astype(np.uint8)
        return VoxelGrid(data), isocenters
    raise GenerationFailureError(
        f"no packed volume with 7 separated subspheres for seed {seed}", config.max_attempts
    )


def _radial_extent(radii: np.ndarray, direction: np.ndarray) -> float:
    """Distance from an axis-aligned ellipsoid's center to its surface along a unit direction."""
    return float(1.0 / np.sqrt(((direction / radii) ** 2).sum()))


def gen_tumor_volume(config: TumorConfig, seed: int) -> VoxelGrid:
    """One irregular connected blob whose voxel count follows the size distribution.

    Built as a chain of overlapping ellipsoid lobes: each new lobe is offset
    from a previously placed one by a fraction of their combined radial
    extents, so lobes protrude and the union spans solidity roughly 0.7..1.0.
    Candidates are rejected unless they form a single 26-connected component
    with a voxel count inside the target size band.
    """
    rng = np.random.default_rng(seed)
    dims = config.dims
    half = (min(dims) - 1) / 2.0
    bounds = np.asarray(dims, dtype=float) - 1.0
    for _ in range(config.max_attempts):
        target = config.size_dist.sample(rng)
        n_lobes = int(rng.integers(config.lobe_count_range[0], config.lobe_count_range[1] + 1))
        base = (3.0 * target / (4.0 * np.pi)) ** (1.0 / 3.0)
        scale = config.lobe_scale_boost * n_lobes ** (-1.0 / 3.0)
        radii = np.clip(base * scale * rng.uniform(*config.primary_scale_range, size=3), 1.0, half)
        center = np.array([rng.uniform(r, b - r) for r, b in zip(radii, bounds)])
        lobes = [(center, radii)]
        union = ellipsoid_mask(dims, center, tuple(radii))
        for _ in range(n_lobes - 1):
            prev_center, prev_radii = lobes[rng.integers(len(lobes))]
            u = rng.standard_normal(3)
            u /= np.linalg.norm(u)
            lobe_radii = np.clip(
                base * scale * rng.uniform(*config.lobe_scale_range, size=3), 1.0, half
            )
            alpha = rng.uniform(*config.chain_offset_range)
            offset = alpha * (_radial_extent(prev_radii, u) + _radial_extent(lobe_radii, u))
            lobe_center = np.clip(prev_center + offset * u, lobe_radii, bounds - lobe_radii)
            lobes.append((lobe_center, lobe_radii))
            union |= ellipsoid_mask(dims, lobe_center, tuple(lobe_radii))
        size = int(union.sum())
        if abs(size - target) > config.size_tolerance * target:
            continue
        if label_mask(union, 26).count != 1:
            continue
        return VoxelGrid(union[np.newaxis].astype(np.uint8))
    raise GenerationFailureError(f"tumor generation failed for seed {seed}", config.max_attempts)


def pack_isocenters(
    volume: VoxelGrid,
    r_min: float = 1.0,
    coverage_target: float = 0.95,
    max_isocenters: int = 20,
    channel: int = 0,
) -> IsocenterSet:
    """Grassfire sphere packing: place subspheres at the deepest uncovered voxels.

    Repeatedly selects the uncovered foreground voxel with the largest
    distance-to-surface d (ties: smallest linear index) and covers the
    foreground ball of radius d around it. Stops when d < r_min, the covered
    fraction reaches coverage_target, or max_isocenters spheres were placed;
    the stopping cause is recorded. Sphere centers never fall in covered
    regions; sphere bodies may overlap.
    """
    if not (0 <= coverage_target <= 1):
        raise ValueError(f"coverage_target must be in [0, 1], got {coverage_target}")
    if r_min < 1.0:
        raise ValueError(f"r_min must be >= 1.0, got {r_min}")
    mask = volume.channel(channel).astype(bool)
    if not mask.any():
        raise EmptyInputError("cannot pack an empty volume")
    fieldv = distance_field(mask)
    total = int(mask.sum())
    covered = np.zeros_like(mask)
    coords = np.indices(mask.shape)
    centers: list[Point3] = []
    radii: list[float] = []
    while True:
        uncovered = mask & ~covered
        if not uncovered.any():
            cause = "coverage_reached"
            break
        flat = np.where(uncovered, fieldv, -1.0).ravel()
        best = int(flat.argmax())  # first maximum in C-order = smallest linear index
        d = float(flat[best])
        if d < r_min:
            cause = "below_r_min"
            break
        if covered.sum() / total >= coverage_target:
            cause = "coverage_reached"
            break
        if len(centers) >= max_isocenters:
            cause = "max_isocenters"
            break
        voxel = np.unravel_index(best, mask.shape)
        centers.append(Point3(*(float(v) for v in voxel)))
        radii.append(d)
        # EDT radii are sqrt of integers, so compare squared distances exactly
        d2 = int(round(d * d))
        dist2 = sum((coords[a] - voxel[a]) ** 2 for a in range(3))
        covered |= mask & (dist2 <= d2)
    return IsocenterSet(tuple(centers), tuple(radii), stop_cause=cause)


def fill_packed_spheres(volume: VoxelGrid, isocenters: IsocenterSet) -> VoxelGrid:
    """Add a channel with each isocenter's covering sphere (clipped to the volume)."""
    if volume.channels != 1:
        raise ValueError("expected a 1-channel volume")
    mask = volume.channel(0).astype(bool)
    coords = np.indices(mask.shape)
    sub = np.zeros_like(mask)
    for point, r in zip(isocenters.centers, isocenters.radii):
        voxel = point.as_array()
        dist2 = sum((coords[a] - voxel[a]) ** 2 for a in range(3))
        sub |= dist2 <= r * r + 1e-9
    sub &= mask
    data = np.stack([mask, sub]).astype(np.uint8)
    return VoxelGrid(data)


def generate_sample(
    kind: str, config, seed: int
) -> tuple[VoxelGrid, IsocenterSet | None]:
    """Generate one dataset sample; packed kinds also return ground-truth isocenters."""
    if kind == "spheres":
        return gen_connected_volume(config, seed), None
    if kind == "spheres-packed":
        return gen_packed_volume(config, seed)
    if kind == "tumors":
        return gen_tumor_volume(config, seed), None
    if kind == "tumors-packed":
        tumor_config, packing = config
        volume = gen_tumor_volume(tumor_config, seed)
        isocenters = pack_isocenters(
            volume,
            r_min=packing.r_min,
            coverage_target=packing.coverage_target,
            max_isocenters=packing.max_isocenters,
        )
        return fill_packed_spheres(volume, isocenters), isocenters
    raise InvalidConfigError(f"unknown dataset kind {kind!r}; expected one of {DATASET_KINDS}")


def default_config(kind: str):
    if kind == "spheres":
        return ConnectedVolumeConfig()
    if kind == "spheres-packed":
        return PackedVolumeConfig()
    if kind == "tumors":
        return TumorConfig()
    if kind == "tumors-packed":
        return (TumorConfig(), PackingConfig())
    raise InvalidConfigError(f"unknown dataset kind {kind!r}; expected one of {DATASET_KINDS}")


def _isocenter_json(isocenters: IsocenterSet) -> list[dict]:
    records = []
    for point, r in zip(isocenters.centers, isocenters.radii):
        records.append(
            {
                "center": [round(point.x, 6), round(point.y, 6), round(point.z, 6)],
                "radius": round(float(r), 6),
            }
        )
    return records


def _config_json(config) -> dict:
    if isinstance(config, tuple):
        return {"tumor": asdict(config[0]), "packing": asdict(config[1])}
    return asdict(config)


def gen_dataset(
    kind: str,
    count: int,
    base_seed: int,
    out_path,
    manifest_path=None,
    config=None,
) -> dict:
    """Generate `count` samples (seeds base_seed + i), write them, return the manifest.

    The manifest records the config echo, per-sample seeds, and ground-truth
    isocenters for packed kinds (6-decimal coordinates).
    """
    if count < 1:
        raise InvalidConfigError(f"count must be >= 1, got {count}")
    if config is None:
        config = default_config(kind)
    grids: list[VoxelGrid] = []
    samples: list[dict] = []
    for i in range(count):
        seed = base_seed + i
        grid, isocenters = generate_sample(kind, config, seed)
        record: dict = {"index": i, "seed": seed}
        if isocenters is not None:
            record["isocenters"] = _isocenter_json(isocenters)
            if isocenters.stop_cause is not None:
                record["stop_cause"] = isocenters.stop_cause
        grids.append(grid)
        samples.append(record)
    dataset_io.write_dataset(grids, out_path)
    manifest = {
        "format": "connvox-manifest",
        "version": 1,
        "kind": kind,
        "count": count,
        "base_seed": base_seed,
        "dims": list(grids[0].dims),
        "channels": grids[0].channels,
        "voxel_volume_mm3": 2.0,
        "config": _config_json(config),
        "samples": samples,
    }
    manifest = json.loads(json.dumps(manifest))  # normalize tuples to JSON lists
    if manifest_path is not None:
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=1)
            fh.write("\n")
    return manifest


def manifest_isocenters(manifest: dict) -> list[IsocenterSet | None]:
    """Rehydrate per-sample ground-truth isocenter sets from a manifest."""
    sets: list[IsocenterSet | None] = []
    for record in manifest["samples"]:
        if "isocenters" not in record:
            sets.append(None)
            continue
        centers = tuple(Point3(*rec["center"]) for rec in record["isocenters"])
        radii = tuple(float(rec["radius"]) for rec in record["isocenters"])
        sets.append(IsocenterSet(centers, radii, stop_cause=record.get("stop_cause")))
    return sets
