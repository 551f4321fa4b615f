"""Exception hierarchy shared across the toolkit."""


class ConnvoxError(Exception):
    """Base class for all toolkit errors."""


class EmptyInputError(ConnvoxError):
    """An operation that needs foreground voxels received none."""


class EmptyRasterizationError(ConnvoxError):
    """Rasterization produced zero voxels (degenerate shape)."""


class UnsupportedRotationError(ConnvoxError):
    """Lattice rotation requested on a non-cubic grid."""


class InvalidConfigError(ConnvoxError):
    """Generator configuration cannot produce valid samples."""


class GenerationFailureError(ConnvoxError):
    """Rejection sampling exhausted its retry budget."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class InternalConsistencyError(ConnvoxError):
    """A by-construction invariant was violated."""


class InvalidBatchError(ConnvoxError):
    """Connection-loss batch mixes expected-object counts."""


class MissingGroundTruthError(ConnvoxError):
    """Multi-object component counting requested without isocenter ground truth."""


class UndefinedMetricError(ConnvoxError):
    """A metric is undefined for the given input (e.g. too few isocenters)."""


class IncompatibleDatasetsError(ConnvoxError):
    """Two corpora cannot be compared (dims or channel mismatch)."""
