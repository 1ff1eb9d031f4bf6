from qentropy.amplitude.amplitude_utils import (
    SUCCESS_PROBABILITY,
    AmplifyResult,
    NoOverlapError,
    QaeOutcome,
    amplification_rounds,
    amplified_fidelity,
    boosted_estimate,
    coverage,
    final_success_probability,
    fixed_point_amplify,
    fixed_point_trajectory,
    qae_distribution,
    qae_error_bound,
    qae_estimate,
    qae_grid_size,
)
