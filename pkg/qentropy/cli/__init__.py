from qentropy.cli.certify_utils import SUITES, CertifyReport, certify
from qentropy.cli.main import main
from qentropy.cli.scaling_utils import InsufficientPointsError, ScalingFit, fit_scaling
from qentropy.cli.sweep_utils import SWEEP_COLUMNS, run_sweep
