"""Synthetic connected 3D volumes: generation, sphere packing, and evaluation metrics."""

from .components import ComponentLabeling, label_components
from .connloss import ConnLossInput, component_counts_for_loss, connection_loss
from .distance import distance_transform
from .grid import (
    PROPER_ROTATIONS,
    LatticeRotation,
    Point3,
    VoxelGrid,
    rasterize_ellipsoid,
    rotate_grid_90,
)
from .hull import convex_hull_lattice_count
from .metrics import (
    EvalConfig,
    MetricsReport,
    MomentInvariants,
    connectivity_ratio,
    convexity_ratio,
    coverage_ratio,
    evaluate_corpus,
    extract_isocenters,
    fd_error,
    frechet_distance,
    kl_divergence_hist,
    moment_invariants,
    ratio_mae,
    shannon_equitability,
    subsphere_coverage,
    target_distance_error,
)
from .shapegen import (
    DATASET_KINDS,
    ConnectedVolumeConfig,
    IsocenterSet,
    PackedVolumeConfig,
    PackingConfig,
    ShapeSpec,
    SizeDistribution,
    TumorConfig,
    fill_packed_spheres,
    gen_connected_volume,
    gen_dataset,
    gen_packed_volume,
    gen_tumor_volume,
    pack_isocenters,
    sample_shape_spec,
)

__version__ = "0.1.0"
