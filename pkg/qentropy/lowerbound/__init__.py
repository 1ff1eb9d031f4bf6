from qentropy.lowerbound.lowerbound_utils import (
    HardInstance,
    ReductionResult,
    build_hard_instance,
    discrete_oracle_view,
    entropy_relation_check,
    instance_frame,
    outcome_counts,
    random_relation_sweep,
    read_bit_matrix,
    recover_entropy,
    reduction_estimate,
    sample_q,
)
