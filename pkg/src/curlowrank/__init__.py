"""Exact CUR decompositions of low-rank matrices via randomized and deterministic selection.

The library covers: dense SVD-derived primitives (compact SVD, pseudoinverse,
stable rank, generalized condition number), row/column sampling distributions
with their size bounds and stability floors, construction and verification of
exact CUR decompositions, greedy deterministic index selection, and a
CUR-based solver for clustering data drawn from a union of independent
subspaces.  A seeded Monte Carlo harness (also exposed as the ``curlowrank``
command) turns the probabilistic guarantees into empirical success-rate
tables.
"""

from .cluster import (
    ClusterLabels,
    SubspaceModel,
    SubspaceSpec,
    clustering_accuracy,
    clustering_matrix,
    generate_union_of_subspaces,
    labels_from_clustering_matrix,
    parse_model_spec,
)
from .cur import (
    EXACTNESS_TOL,
    CharacterizationReport,
    CurFactors,
    approx_error,
    build_cur,
    randomized_cur,
    verify_characterization,
)
from .deim import DeimSelection, NoiseCertificate, deim_cur, deim_noise_certificate, deim_select
from .errors import (
    ConfigError,
    DivisionByZeroWeightError,
    DomainError,
    IndexOutOfRangeError,
    NoiseDominatesError,
    RankDeficientError,
    SingularInterpolationError,
    TooManyClustersError,
    ZeroMatrixError,
    ZeroProbabilityDrawError,
)
from .harness import (
    ExperimentConfig,
    TrialRecord,
    config_from_mapping,
    config_from_text,
    emit_csv,
    lowrank_gaussian,
    run_clustering_experiment,
    run_deim_experiment,
    run_experiment,
    run_noise_experiment,
    run_success_probability_experiment,
    spectral_noise,
    trial_generator,
    zero_out_columns,
)
from .linalg import (
    COLS,
    ROWS,
    IndexSet,
    SvdFactors,
    as_matrix,
    compact_svd,
    condition_number,
    default_tolerance,
    numerical_rank,
    pseudoinverse,
    stable_rank,
    submatrix,
)
from .mmio import read_matrix, write_matrix
from .sampling import (
    ProbDist,
    SampleSizeSpec,
    StabilityParams,
    dedup_indices,
    draw_with_replacement,
    epsilon_ceiling,
    leverage_dist,
    leverage_dominance_ratio,
    length_dist,
    min_sample_size_rv,
    noisy_stability_floor,
    rescaled_submatrix,
    sample_size_length_via_lev,
    sample_size_leverage,
    uniform_dist,
    uniform_stability_floor,
)

__version__ = "0.1.0"
