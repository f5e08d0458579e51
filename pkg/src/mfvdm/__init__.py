"""Multi-frequency vector diffusion maps on angular-alignment graphs."""

from mfvdm.angles import wrap_pi, wrap_two_pi
from mfvdm.alignment import (
    AlignmentSequence,
    AlignmentTable,
    AngleEstimate,
    align_neighbors,
    alignment_sequence,
    estimate_angle,
    estimate_angles,
)
from mfvdm.config import ExperimentConfig, load_config_file, resolve_config
from mfvdm.connection import (
    DegreeVector,
    SparseHermitian,
    build_sk,
    build_wk,
    degrees,
)
from mfvdm.embedding import (
    EmbeddingSet,
    FrequencyFeatures,
    NeighborList,
    affinity_k,
    baseline_embedding,
    build_embedding_set,
    build_features,
    mfvdm_affinity,
    mfvdm_distance,
    nn_search,
    normalized_affinity,
)
from mfvdm.errors import (
    ConfigError,
    ConvergenceError,
    DegenerateAlignmentError,
    DegenerateEmbeddingError,
    GraphFileError,
    MfvdmError,
    ParameterError,
    UndefinedAlignmentError,
    UnsupportedManifoldError,
    ZeroDegreeError,
)
from mfvdm.evaluation import (
    EvalReport,
    SpectralReport,
    detect_clusters,
    score_alignment,
    score_nn,
    spectral_report,
    theoretical_eigenvalue,
    theoretical_gap,
    theoretical_multiplicity,
)
from mfvdm.graph import (
    AlignmentGraph,
    RewireDiagnostics,
    build_clean_knn_graph,
    rewire_graph,
)
from mfvdm.sampling import (
    SphereTruth,
    TorusTruth,
    geodesic_distance,
    make_truth,
    optimal_inplane_angle,
    sample_so3_uniform,
    sample_torus_uniform,
)
from mfvdm.spectral import SpectralBundle, gauge_fix, top_eigenpairs

__version__ = "0.1.0"

__all__ = [
    "AlignmentGraph",
    "AlignmentSequence",
    "AlignmentTable",
    "AngleEstimate",
    "ConfigError",
    "ConvergenceError",
    "DegenerateAlignmentError",
    "DegenerateEmbeddingError",
    "DegreeVector",
    "EmbeddingSet",
    "EvalReport",
    "ExperimentConfig",
    "FrequencyFeatures",
    "GraphFileError",
    "MfvdmError",
    "NeighborList",
    "ParameterError",
    "RewireDiagnostics",
    "SparseHermitian",
    "SpectralBundle",
    "SpectralReport",
    "SphereTruth",
    "TorusTruth",
    "UndefinedAlignmentError",
    "UnsupportedManifoldError",
    "ZeroDegreeError",
    "affinity_k",
    "align_neighbors",
    "alignment_sequence",
    "baseline_embedding",
    "build_clean_knn_graph",
    "build_embedding_set",
    "build_features",
    "build_sk",
    "build_wk",
    "degrees",
    "detect_clusters",
    "estimate_angle",
    "estimate_angles",
    "gauge_fix",
    "geodesic_distance",
    "load_config_file",
    "make_truth",
    "mfvdm_affinity",
    "mfvdm_distance",
    "nn_search",
    "normalized_affinity",
    "optimal_inplane_angle",
    "resolve_config",
    "rewire_graph",
    "sample_so3_uniform",
    "sample_torus_uniform",
    "score_alignment",
    "score_nn",
    "spectral_report",
    "theoretical_eigenvalue",
    "theoretical_gap",
    "theoretical_multiplicity",
    "top_eigenpairs",
    "wrap_pi",
    "wrap_two_pi",
    "__version__",
]
