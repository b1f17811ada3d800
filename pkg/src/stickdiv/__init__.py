"""Stick-breaking random measures and their random Kullback-Leibler divergences.

The package samples Dirichlet, geometric, and Dirichlet-driven exchangeable
stick-breaking priors, evaluates their pathwise KL divergences, provides the
closed-form moments, series identities and bounds attached to them, and
reproduces the associated simulation studies as CSV data via the ``stickdiv``
command-line tool.
"""

from .closed_form import (
    VARIANCE_LIMIT,
    DivergentSeriesError,
    SeriesResult,
    dtheta_upper_bound,
    expected_binary_divergence,
    expected_kl_coupled,
    expected_kl_reversed,
    expected_kl_uncoupled,
    expected_weighted_pair_divergence,
    inverse_rising_partial_sums,
    quotient_rising_partial_sums,
    series_inverse_rising,
    series_quotient_rising,
    variance_kl_coupled,
    variance_kl_uncoupled,
)
from .divergence import (
    binary_divergence,
    kl_direct,
    kl_forward_paths,
    kl_forward_pathwise,
    kl_reverse_paths,
    kl_reverse_pathwise,
    total_variation,
)
from .montecarlo import (
    ExperimentConfig,
    ExperimentResult,
    RunningStats,
    merge_stats,
    replicate_rng,
    run_dtheta_curve,
    run_kl_experiment,
    run_variance_curve,
)
from .partitions import (
    PartitionSumResult,
    SetPartition,
    bell_number,
    dtheta_partition_sum,
    enumerate_partitions,
    eppf_dp,
    f_theta,
)
from .special import (
    EULER_GAMMA,
    BetaLogMoments,
    beta_log_moments,
    beta_power_moment,
    beta_weighted_log_moment,
    digamma,
    log_beta,
    log_gamma,
    log_rising_factorial,
    trigamma,
)
from .stickbreak import (
    CLAMP_EPS,
    DEFAULT_TRUNCATION,
    LengthSequence,
    ModelSpec,
    WeightSequence,
    sample_beta,
    sample_dp_lengths,
    sample_exchangeable_dp_lengths,
    sample_geometric_lengths,
    tail_mass,
    weights_from_lengths,
)

__version__ = "0.1.0"
