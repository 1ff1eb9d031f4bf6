from qentropy.estimator.entropy_model import EntropyEstimationModel, estimate_entropy, folklore_estimate
from qentropy.estimator.estimator_utils import (
    EstimateReport,
    EstimatorParams,
    LevelRecord,
    LevelTable,
    choose_params,
    error_envelope,
    exact_level_values,
    exact_v,
    level_table,
    levels_for,
)
