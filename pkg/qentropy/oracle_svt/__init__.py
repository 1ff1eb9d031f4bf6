from qentropy.oracle_svt.oracle_model import (
    FORMULAS,
    LedgerEntry,
    OracleModel,
    QueryLedger,
    charge,
)
from qentropy.oracle_svt.svt_utils import FlaggedAmplitudes, apply_svt, power_sum
