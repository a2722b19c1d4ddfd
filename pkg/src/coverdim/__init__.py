"""coverdim: intrinsic dimension estimation via cover-based local PCA.

The estimator covers the data set with small neighborhoods, runs a
noise-filtered PCA on each retained subset, and combines the local spectra
into a global dimension estimate. Batch and incremental modes are provided,
plus a nearest-neighbor maximum-likelihood baseline and seeded synthetic
manifold generators for experiments.
"""

__version__ = "0.1.0"

from .cover import Cover, Neighborhood, NeighborhoodSpec, build_neighborhoods, minimum_cover
from .cpca import (
    CpcaState,
    GlobalEstimate,
    aggregate_spectra,
    current_estimate,
    estimate_batch,
    init_incremental,
    insert_point,
    load_state,
    save_state,
    verify_aggregated,
)
from .dataio import DataFormatError, read_points_csv, write_points_csv
from .datagen import (
    CorruptionSpec,
    ManifoldSpec,
    corrupt,
    cube,
    generate,
    hypersphere,
    mobius,
    subspace,
    swiss_roll,
)
from .linalg import PointSet, Spectrum, covariance_spectrum, distance_matrix, eigendecompose_symmetric
from .mle import DegenerateNeighborError, MleEstimate, mle_global, mle_local
from .spectra import (
    DenoisedSpectrum,
    IdCriteria,
    LocalEstimate,
    denoise,
    estimate_noise_variance,
    id_by_ratio,
    id_by_variance_pct,
    local_id,
    locate_noise_start,
)

__all__ = [
    "__version__",
    "Cover",
    "CorruptionSpec",
    "CpcaState",
    "DataFormatError",
    "DegenerateNeighborError",
    "DenoisedSpectrum",
    "GlobalEstimate",
    "IdCriteria",
    "LocalEstimate",
    "ManifoldSpec",
    "MleEstimate",
    "Neighborhood",
    "NeighborhoodSpec",
    "PointSet",
    "Spectrum",
    "aggregate_spectra",
    "build_neighborhoods",
    "corrupt",
    "covariance_spectrum",
    "cube",
    "current_estimate",
    "denoise",
    "distance_matrix",
    "eigendecompose_symmetric",
    "estimate_batch",
    "estimate_noise_variance",
    "generate",
    "hypersphere",
    "id_by_ratio",
    "id_by_variance_pct",
    "init_incremental",
    "insert_point",
    "load_state",
    "local_id",
    "locate_noise_start",
    "minimum_cover",
    "mle_global",
    "mle_local",
    "mobius",
    "read_points_csv",
    "save_state",
    "subspace",
    "swiss_roll",
    "verify_aggregated",
    "write_points_csv",
]
