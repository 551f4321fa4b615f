"""Shape and distance evaluation metrics for voxel corpora.

Shape metrics (any dataset): volume size, component count, connectivity
ratio, convexity ratio, second-order moment invariants. Packed datasets add
Shannon equitability of subsphere sizes, subsphere coverage, the connected
subsphere fraction, and three isocenter-location metrics (discrete Frechet
error, surface/center ratio MAE, target distance error). Corpus comparisons
report histogram KL divergences between the real and generated metric
distributions.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

from .components import label_mask
from .distance import distance_field
from .errors import (
    EmptyInputError,
    IncompatibleDatasetsError,
    UndefinedMetricError,
)
from .grid import Point3, VoxelGrid
from .shape_stats import mask_convexity_ratio, points_connectivity_ratio
from .shapegen import IsocenterSet

__all__ = [
    "MomentInvariants",
    "EvalConfig",
    "MetricsReport",
    "connectivity_ratio",
    "convexity_ratio",
    "coverage_ratio",
    "moment_invariants",
    "shannon_equitability",
    "subsphere_coverage",
    "connected_subspheres_fraction",
    "extract_isocenters",
    "ideal_isocenters",
    "frechet_distance",
    "fd_error",
    "compute_isocenter_distances",
    "ratio_mae",
    "target_distance_error",
    "kl_divergence_hist",
    "evaluate_corpus",
]


@dataclass(frozen=True)
class MomentInvariants:
    """Rotation/translation/scale-normalized second-order shape descriptors."""

    omega1: float
    omega2: float
    omega3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.omega1, self.omega2, self.omega3)


@dataclass(frozen=True)
class EvalConfig:
    tau_conn: float = 0.90
    tau_conv: float = 0.70
    bins: int = 32
    epsilon: float = 1e-10
    connectivity: int = 26


# ---------------------------------------------------------------------------
# per-shape metrics


def _foreground_points(grid: VoxelGrid, channel: int) -> np.ndarray:
    pts = np.argwhere(grid.channel(channel))
    if len(pts) == 0:
        raise EmptyInputError(f"channel {channel} has no foreground voxels")
    return pts.astype(float)


def connectivity_ratio(grid: VoxelGrid, channel: int = 0) -> float:
    """Fraction of foreground voxels surviving a single-pass 2-sigma cut on
    distance to the foreground centroid."""
    return points_connectivity_ratio(_foreground_points(grid, channel))


def convexity_ratio(grid: VoxelGrid, channel: int = 0) -> float:
    """Foreground voxel count divided by the lattice-point count of its convex hull."""
    return mask_convexity_ratio(grid.channel(channel).astype(bool))


def coverage_ratio(
    sample_ratios: Sequence[tuple[float | None, float | None]],
    tau_conn: float = 0.90,
    tau_conv: float = 0.70,
) -> float:
    """Fraction of samples whose (connectivity, convexity) pass both thresholds."""
    if len(sample_ratios) == 0:
        raise EmptyInputError("need at least one sample")
    passed = sum(
        1
        for conn, conv in sample_ratios
        if conn is not None and conv is not None and conn >= tau_conn and conv >= tau_conv
    )
    return passed / len(sample_ratios)


def moment_invariants(grid: VoxelGrid, channel: int = 0) -> MomentInvariants:
    """Trace, sum of principal minors, and determinant of the scale-normalized
    central second-moment matrix (eta = mu / mu000^(5/3), unit mass per voxel)."""
    pts = np.argwhere(grid.channel(channel))
    if len(pts) == 0:
        raise EmptyInputError(f"channel {channel} has no foreground voxels")
    return _moment_invariants_points(pts)


def _moment_invariants_points(pts: np.ndarray) -> MomentInvariants:
    # shift to the bounding-box origin so lattice translations are exact no-ops
    local = (pts - pts.min(axis=0)).astype(float)
    n = len(local)
    centered = local - local.mean(axis=0)
    m = centered.T @ centered
    eta = m / n ** (5.0 / 3.0)
    omega1 = float(np.trace(eta))
    omega2 = float(
        eta[0, 0] * eta[1, 1]
        + eta[1, 1] * eta[2, 2]
        + eta[0, 0] * eta[2, 2]
        - eta[0, 1] ** 2
        - eta[0, 2] ** 2
        - eta[1, 2] ** 2
    )
    omega3 = float(np.linalg.det(eta))
    return MomentInvariants(omega1, omega2, omega3)


def shannon_equitability(sizes: Sequence[float]) -> float:
    """Entropy of size shares normalized by log K; 1 means perfectly even."""
    if len(sizes) == 0:
        raise EmptyInputError("need at least one component size")
    if any(s <= 0 for s in sizes):
        raise ValueError(f"component sizes must be positive, got {tuple(sizes)}")
    if len(sizes) == 1:
        return 1.0
    total = math.fsum(sizes)
    shares = [s / total for s in sizes]
    entropy = -math.fsum(p * math.log(p) for p in shares)
    return entropy / math.log(len(sizes))


def subsphere_coverage(grid: VoxelGrid) -> float:
    """Fraction of the main volume covered by the subsphere channel."""
    if grid.channels < 2:
        raise ValueError("subsphere coverage needs a 2-channel grid")
    main = grid.channel(0).astype(bool)
    sub = grid.channel(1).astype(bool)
    total = int(main.sum())
    if total == 0:
        raise EmptyInputError("channel 0 has no foreground voxels")
    return int((main & sub).sum()) / total


def connected_subspheres_fraction(
    grid: VoxelGrid,
    tau_conn: float = 0.90,
    tau_conv: float = 0.70,
    connectivity: int = 26,
) -> float:
    """Fraction of channel-1 components that individually pass the shape thresholds."""
    if grid.channels < 2:
        raise ValueError("subsphere metrics need a 2-channel grid")
    labeling = label_mask(grid.channel(1).astype(bool), connectivity)
    if labeling.count == 0:
        return 0.0
    passed = 0
    for label in range(1, labeling.count + 1):
        mask = labeling.component_mask(label)
        points = np.argwhere(mask).astype(float)
        conn = points_connectivity_ratio(points)
        conv = mask_convexity_ratio(mask)
        if conn >= tau_conn and conv >= tau_conv:
            passed += 1
    return passed / labeling.count


# ---------------------------------------------------------------------------
# isocenter extraction and distance metrics


def extract_isocenters(grid: VoxelGrid, channel: int = 1, connectivity: int = 26) -> IsocenterSet:
    """One isocenter per connected component: centroid plus equivalent-ball radius."""
    labeling = label_mask(grid.channel(channel).astype(bool), connectivity)
    centers = []
    radii = []
    for label, size in enumerate(labeling.component_sizes, start=1):
        centroid = np.argwhere(labeling.component_mask(label)).mean(axis=0)
        centers.append(Point3(*centroid))
        radii.append((3.0 * size / (4.0 * math.pi)) ** (1.0 / 3.0))
    return IsocenterSet(tuple(centers), tuple(radii))


def ideal_isocenters(grid: VoxelGrid, channel: int = 0) -> IsocenterSet:
    """The seven ideal subsphere centers implied by a volume: its centroid plus
    the mid-axis points at half the per-axis half-extent, in canonical order
    (center, +x, -x, +y, -y, +z, -z)."""
    pts = _foreground_points(grid, channel)
    centroid = pts.mean(axis=0)
    half_extent = (pts.max(axis=0) - pts.min(axis=0)) / 2.0
    centers = [Point3(*centroid)]
    for axis in range(3):
        for sign in (1.0, -1.0):
            offset = np.zeros(3)
            offset[axis] = sign * half_extent[axis] / 2.0
            centers.append(Point3(*(centroid + offset)))
    radii = tuple([max(float(min(half_extent)), 1e-9)] + [
        max(float(half_extent[axis]), 1e-9) for axis in range(3) for _ in (0, 1)
    ])
    return IsocenterSet(tuple(centers), radii)


def volume_half_extents(grid: VoxelGrid, channel: int = 0) -> tuple[float, float, float]:
    pts = _foreground_points(grid, channel)
    ext = (pts.max(axis=0) - pts.min(axis=0)) / 2.0
    return (float(ext[0]), float(ext[1]), float(ext[2]))


def match_to_slots(generated: IsocenterSet, reference: IsocenterSet) -> list[tuple[int, int]]:
    """Assign generated isocenters to reference slots by nearest reference point.

    Each slot keeps at most one generated point (the closest of its
    claimants); unmatched slots and unclaimed generated points drop out.
    Returns (slot_index, generated_index) pairs in slot order.
    """
    if len(generated) == 0 or len(reference) == 0:
        return []
    gen = generated.centers_array()
    ref = reference.centers_array()
    dist = np.linalg.norm(gen[:, None, :] - ref[None, :, :], axis=2)
    nearest_slot = dist.argmin(axis=1)
    pairs = []
    for slot in range(len(reference)):
        claimants = np.flatnonzero(nearest_slot == slot)
        if len(claimants) == 0:
            continue
        best = claimants[dist[claimants, slot].argmin()]
        pairs.append((slot, int(best)))
    return pairs


def frechet_distance(path_a: np.ndarray, path_b: np.ndarray) -> float:
    """Discrete Frechet distance between two point sequences (standard DP)."""
    a = np.asarray(path_a, dtype=float)
    b = np.asarray(path_b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or len(a) == 0 or len(b) == 0:
        raise ValueError("sequences must be non-empty (n, d) arrays")
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    n, m = d.shape
    ca = np.empty((n, m))
    ca[0, 0] = d[0, 0]
    for j in range(1, m):
        ca[0, j] = max(ca[0, j - 1], d[0, j])
    for i in range(1, n):
        ca[i, 0] = max(ca[i - 1, 0], d[i, 0])
        for j in range(1, m):
            ca[i, j] = max(min(ca[i - 1, j], ca[i - 1, j - 1], ca[i, j - 1]), d[i, j])
    return float(ca[n - 1, m - 1])


def fd_error(generated: IsocenterSet, reference: IsocenterSet) -> float:
    """Discrete Frechet distance between slot-matched generated and reference
    isocenter sequences in canonical slot order."""
    if len(generated) == 0 or len(reference) == 0:
        raise UndefinedMetricError("both isocenter sets must be non-empty")
    pairs = match_to_slots(generated, reference)
    if not pairs:
        raise UndefinedMetricError("no generated isocenter matched a reference slot")
    ref = reference.centers_array()
    gen = generated.centers_array()
    ref_seq = np.array([ref[slot] for slot, _ in pairs])
    gen_seq = np.array([gen[g] for _, g in pairs])
    return frechet_distance(ref_seq, gen_seq)


def compute_isocenter_distances(
    isocenters: IsocenterSet, grid: VoxelGrid, channel: int = 0
) -> IsocenterSet:
    """Fill in each isocenter's distance to the volume surface (distance
    transform at its voxel) and to the volume centroid."""
    mask = grid.channel(channel).astype(bool)
    if not mask.any():
        raise EmptyInputError("channel 0 has no foreground voxels")
    fieldv = distance_field(mask)
    centroid = np.argwhere(mask).mean(axis=0)
    d_surface = []
    d_center = []
    dims = np.asarray(grid.dims)
    for point in isocenters.centers:
        voxel = np.clip(np.round(point.as_array()).astype(int), 0, dims - 1)
        d_surface.append(float(fieldv[tuple(voxel)]))
        d_center.append(float(np.linalg.norm(point.as_array() - centroid)))
    return IsocenterSet(
        isocenters.centers,
        isocenters.radii,
        d_surface=tuple(d_surface),
        d_center=tuple(d_center),
        stop_cause=isocenters.stop_cause,
    )


def ratio_mae(isocenters: IsocenterSet, center_index: int | None = None) -> float:
    """MAE of |0.5 - D_s / (D_s + D_c)| over non-center isocenters."""
    if isocenters.d_surface is None or isocenters.d_center is None:
        raise ValueError("isocenter distances not computed; call compute_isocenter_distances")
    if center_index is None:
        center_index = int(np.argmin(isocenters.d_center))
    deviations = []
    for i in range(len(isocenters)):
        if i == center_index:
            continue
        ds = isocenters.d_surface[i]
        dc = isocenters.d_center[i]
        if ds + dc == 0:
            continue
        deviations.append(abs(0.5 - ds / (ds + dc)))
    if not deviations:
        raise UndefinedMetricError("no non-center isocenter with a defined ratio")
    return math.fsum(deviations) / len(deviations)


def target_distance_error(
    isocenters: IsocenterSet,
    radii: tuple[float, float, float],
    center_index: int | None = None,
) -> float:
    """Mean gap between each isocenter's nearest-neighbor distance and the
    closest expected target distance.

    Targets: the three radii plus the three mixed terms sqrt(r_i^2 + r_j^2)/2.
    The center isocenter (if designated) is excluded from both roles.
    """
    n = len(isocenters)
    if n < 2:
        raise UndefinedMetricError("target distance error needs at least two isocenters")
    ra, rb, rc = radii
    targets = np.array(
        [
            ra,
            rb,
            rc,
            0.5 * math.sqrt(ra**2 + rb**2),
            0.5 * math.sqrt(ra**2 + rc**2),
            0.5 * math.sqrt(rb**2 + rc**2),
        ]
    )
    pts = isocenters.centers_array()
    keep = [i for i in range(n) if i != center_index]
    errors = []
    for i in keep:
        others = [j for j in keep if j != i]
        if not others:
            continue
        d = np.linalg.norm(pts[others] - pts[i], axis=1).min()
        errors.append(float(np.abs(targets - d).min()))
    if not errors:
        raise UndefinedMetricError("no isocenter pair to measure")
    return math.fsum(errors) / len(errors)


# ---------------------------------------------------------------------------
# distribution comparison


def kl_divergence_hist(
    real_values: Sequence[float],
    generated_values: Sequence[float],
    bins: int = 32,
    epsilon: float = 1e-10,
) -> float:
    """KL(real || generated) over shared equal-width histograms with additive
    smoothing. Returns exactly 0 for identical inputs and for degenerate
    (zero-width) pooled ranges."""
    real = np.asarray(real_values, dtype=float)
    gen = np.asarray(generated_values, dtype=float)
    if len(real) == 0 or len(gen) == 0:
        raise EmptyInputError("both value lists must be non-empty")
    lo = min(real.min(), gen.min())
    hi = max(real.max(), gen.max())
    if lo == hi:
        return 0.0
    edges = np.linspace(lo, hi, bins + 1)
    p = np.histogram(real, bins=edges)[0] / len(real)
    q = np.histogram(gen, bins=edges)[0] / len(gen)
    p = (p + epsilon) / (1.0 + bins * epsilon)
    q = (q + epsilon) / (1.0 + bins * epsilon)
    return float(np.sum(p * np.log(p / q)))


def _histogram_export(real, gen, bins, epsilon):
    real = np.asarray(real, dtype=float)
    gen = np.asarray(gen, dtype=float)
    lo = min(real.min(), gen.min())
    hi = max(real.max(), gen.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    p = np.histogram(real, bins=edges)[0] / len(real)
    q = np.histogram(gen, bins=edges)[0] / len(gen)
    p = (p + epsilon) / (1.0 + bins * epsilon)
    q = (q + epsilon) / (1.0 + bins * epsilon)
    return {
        "bin_left": edges[:-1].tolist(),
        "bin_right": edges[1:].tolist(),
        "p_real": p.tolist(),
        "p_generated": q.tolist(),
    }


# ---------------------------------------------------------------------------
# corpus evaluation

_SHAPE_METRICS = (
    "volume_size",
    "component_count",
    "connectivity_ratio",
    "convexity_ratio",
    "omega1",
    "omega2",
    "omega3",
)
_PACKED_METRICS = (
    "shannon_equitability",
    "subsphere_coverage",
    "connected_subspheres_fraction",
    "fd_error",
    "ratio_mae",
    "target_distance_error",
)
_KL_METRICS = ("volume_size", "connectivity_ratio", "convexity_ratio")


def _sample_record(grid: VoxelGrid, config: EvalConfig) -> dict:
    record: dict = {}
    mask = grid.channel(0).astype(bool)
    record["volume_size"] = int(mask.sum())
    record["component_count"] = label_mask(mask, config.connectivity).count
    if record["volume_size"] == 0:
        record["connectivity_ratio"] = None
        record["convexity_ratio"] = None
        record["omega1"] = record["omega2"] = record["omega3"] = None
    else:
        points = np.argwhere(mask).astype(float)
        record["connectivity_ratio"] = points_connectivity_ratio(points)
        record["convexity_ratio"] = mask_convexity_ratio(mask)
        moments = _moment_invariants_points(np.argwhere(mask))
        record["omega1"], record["omega2"], record["omega3"] = moments.as_tuple()
    if grid.channels >= 2:
        _packed_sample_record(grid, config, record)
    conn, conv = record["connectivity_ratio"], record["convexity_ratio"]
    record["passes_thresholds"] = bool(
        conn is not None and conv is not None and conn >= config.tau_conn and conv >= config.tau_conv
    )
    return record


def _packed_sample_record(grid: VoxelGrid, config: EvalConfig, record: dict) -> None:
    labeling = label_mask(grid.channel(1).astype(bool), config.connectivity)
    record["subsphere_count"] = labeling.count
    record["shannon_equitability"] = (
        shannon_equitability(labeling.component_sizes) if labeling.count else None
    )
    record["subsphere_coverage"] = (
        subsphere_coverage(grid) if record["volume_size"] else None
    )
    record["connected_subspheres_fraction"] = connected_subspheres_fraction(
        grid, config.tau_conn, config.tau_conv, config.connectivity
    )
    record["fd_error"] = None
    record["ratio_mae"] = None
    record["target_distance_error"] = None
    if record["volume_size"] == 0 or labeling.count == 0:
        return
    generated = extract_isocenters(grid, 1, config.connectivity)
    reference = ideal_isocenters(grid, 0)
    try:
        record["fd_error"] = fd_error(generated, reference)
    except UndefinedMetricError:
        pass
    pairs = match_to_slots(generated, reference)
    with_d = compute_isocenter_distances(generated, grid, 0)
    # the center role goes to the slot-0 match, falling back to the
    # isocenter nearest the volume centroid
    center_index = next((g for slot, g in pairs if slot == 0), None)
    if center_index is None:
        center_index = int(np.argmin(with_d.d_center))
    try:
        record["ratio_mae"] = ratio_mae(with_d, center_index)
    except UndefinedMetricError:
        pass
    try:
        record["target_distance_error"] = target_distance_error(
            with_d, volume_half_extents(grid, 0), center_index
        )
    except UndefinedMetricError:
        pass


def _aggregate(values: list) -> dict:
    present = [v for v in values if v is not None]
    if not present:
        return {"mean": None, "std": None, "count": 0}
    n = len(present)
    mean = math.fsum(present) / n
    var = math.fsum((v - mean) ** 2 for v in present) / n
    return {"mean": mean, "std": math.sqrt(var), "count": n}


@dataclass
class MetricsReport:
    """Per-sample metrics, aggregates, KL divergences, and coverage ratios."""

    config: dict
    packed: bool
    real: dict
    generated: dict
    kl_divergence: dict
    histograms: dict

    def to_json_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int | None = 1) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls(**json.loads(text))

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def write_histogram_csv(self, metric: str, path) -> None:
        hist = self.histograms[metric]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "p_real", "p_generated"])
            for row in zip(hist["bin_left"], hist["bin_right"], hist["p_real"], hist["p_generated"]):
                writer.writerow(row)


def _summarize(records: list[dict], metrics: tuple[str, ...]) -> dict:
    aggregates = {m: _aggregate([r.get(m) for r in records]) for m in metrics}
    cov = sum(1 for r in records if r["passes_thresholds"]) / len(records)
    return {
        "count": len(records),
        "coverage_ratio": cov,
        "aggregates": aggregates,
        "per_sample": records,
    }


def evaluate_corpus(
    real: Sequence[VoxelGrid],
    generated: Sequence[VoxelGrid],
    config: EvalConfig = EvalConfig(),
) -> MetricsReport:
    """Evaluate two corpora and compare their metric distributions."""
    real = list(real)
    generated = list(generated)
    if not real or not generated:
        raise IncompatibleDatasetsError("both corpora must be non-empty")
    dims, channels = real[0].dims, real[0].channels
    for name, corpus in (("real", real), ("generated", generated)):
        for i, grid in enumerate(corpus):
            if grid.dims != dims or grid.channels != channels:
                raise IncompatibleDatasetsError(
                    f"{name} sample {i} has {grid.channels}x{grid.dims}, "
                    f"expected {channels}x{dims}"
                )
    packed = channels >= 2
    metric_names = _SHAPE_METRICS + (_PACKED_METRICS if packed else ())
    real_records = [_sample_record(g, config) for g in real]
    gen_records = [_sample_record(g, config) for g in generated]

    kl = {}
    histograms = {}
    kl_metrics = _KL_METRICS + (("shannon_equitability",) if packed else ())
    for metric in kl_metrics:
        rv = [r[metric] for r in real_records if r.get(metric) is not None]
        gv = [r[metric] for r in gen_records if r.get(metric) is not None]
        if rv and gv:
            kl[metric] = kl_divergence_hist(rv, gv, config.bins, config.epsilon)
            histograms[metric] = _histogram_export(rv, gv, config.bins, config.epsilon)
        else:
            kl[metric] = None

    return MetricsReport(
        config=asdict(config),
        packed=packed,
        real=_summarize(real_records, metric_names),
        generated=_summarize(gen_records, metric_names),
        kl_divergence=kl,
        histograms=histograms,
    )
