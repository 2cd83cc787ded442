"""Sampling and independence testing for edge-correlated random graph pairs.

Two simple graphs on a shared vertex set are modelled as marginally
inhomogeneous Erdos-Renyi with a symmetric matrix of pairwise edge
correlations; the package samples such pairs (flat, blockmodel, latent
position, and planted-clique constructions), tests the hypothesis that all
correlations vanish, and estimates the correlations for downstream use such
as link prediction.
"""

__version__ = "0.1.0"

from .estimate import (
    DegenerateTruthError,
    HoldoutMask,
    RocCurve,
    apply_mask,
    block_mean_R,
    estimate_R,
    holdout_mask,
    naive_block_pearson,
    predict_links,
    roc_curve,
)
from .graphs import (
    DimensionMismatchError,
    EdgeListError,
    GraphCorrError,
    GraphPair,
    abs_diff,
    as_adjacency,
    as_corr_matrix,
    as_prob_matrix,
    complement,
    hadamard,
    read_edge_list,
    read_matrix_csv,
    union_indicator,
    write_edge_list,
    write_matrix_csv,
)
from .hyptest import (
    BlockCorrelations,
    DegenerateBlockWarning,
    SecondMoment,
    TestReport,
    block_correlations,
    bootstrap_test_diff,
    bootstrap_test_same,
    graphon_stat_diff,
    graphon_stat_same,
    lambda1_statistic,
    lambda1_test,
    normalized_stat,
    sbm_chi2_test,
    second_moment,
    spectral_cluster,
)
from .samplers import (
    GraphonSpec,
    InvalidCorrelationError,
    JointEdgeDistribution,
    SbmSpec,
    correlation_bounds,
    correlation_bounds_arrays,
    joint_pmf,
    pair_to_clique_instance,
    planted_clique_to_pair,
    rademacher_R,
    random_memberships,
    sample_graphon_pair,
    sample_pair,
    sample_planted_clique,
    sample_sbm_pair,
    sbm_matrices,
)
from .spectral import RankZeroWarning, UsvtConfig, lambda1, top_singular_truncation, usvt
from .statdist import (
    chi2_cdf,
    chi2_quantile,
    noncentral_chi2_cdf,
    sbm_noncentrality,
    sbm_theoretical_power,
)
