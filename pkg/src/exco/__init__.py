"""Extreme-community clustering for multivariate time series.

Channels whose large absolute amplitudes co-occur are grouped by
projecting threshold exceedances (on the unit-Pareto scale) onto the
positive unit sphere and running spherical k-means on the resulting
directions. The package also provides canonical-band filtering,
sliding-window analysis, tail-dependence estimation, and seed-exact
synthetic data generators for validation.
"""

__version__ = "0.1.0"

from exco.clustering import (
    ClusterModel,
    CommunityAssignment,
    ExtremeDirections,
    KSweepResult,
    assign_communities,
    cosine_dissimilarity,
    extract_extreme_directions,
    k_sweep,
    lloyd_iterations,
    objective,
    quadratic_dissimilarity,
    spherical_kmeans,
)
from exco.errors import (
    BandError,
    DegenerateDataError,
    ExcoError,
    InfeasibleError,
    InputError,
    ParameterError,
    ParseError,
    PlanError,
)
from exco.evt import (
    ChiMatrix,
    GevParams,
    ParetoMatrix,
    SignalMatrix,
    absolute_amplitude,
    chi_matrix,
    empirical_chi,
    empirical_pareto_transform,
    gev_cdf,
    gev_pdf,
)
from exco.signal import (
    BandSpec,
    PersistenceMatrix,
    WindowPlan,
    WindowedRun,
    band_by_name,
    bandpass,
    canonical_bands,
    persistence_matrix,
    run_pipeline,
    sliding_windows,
    windowed_communities,
)
from exco.simulate import (
    MaModel,
    PlantedDataset,
    StableParams,
    make_fig3_triplet,
    sample_symmetric_stable,
    simulate_ma,
    synthetic_block_dataset,
)

__all__ = [
    "__version__",
    "BandError", "DegenerateDataError", "ExcoError", "InfeasibleError",
    "InputError", "ParameterError", "ParseError", "PlanError",
    "SignalMatrix", "ParetoMatrix", "GevParams", "ChiMatrix",
    "absolute_amplitude", "empirical_pareto_transform", "gev_cdf", "gev_pdf",
    "empirical_chi", "chi_matrix",
    "ExtremeDirections", "ClusterModel", "CommunityAssignment", "KSweepResult",
    "extract_extreme_directions", "cosine_dissimilarity", "quadratic_dissimilarity",
    "spherical_kmeans", "lloyd_iterations", "objective", "assign_communities", "k_sweep",
    "BandSpec", "WindowPlan", "PersistenceMatrix", "WindowedRun",
    "canonical_bands", "band_by_name", "bandpass", "sliding_windows",
    "run_pipeline", "windowed_communities", "persistence_matrix",
    "StableParams", "MaModel", "PlantedDataset",
    "sample_symmetric_stable", "simulate_ma", "make_fig3_triplet", "synthetic_block_dataset",
]
