import logging
from dataclasses import dataclass

import numpy as np

from qentropy.polyapprox import UncertifiedPolynomialError, eval_poly, first_failure

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class FlaggedAmplitudes:
    """Amplitudes of the flag-1 branch after SVT, and the squared norm of everything else."""

    flagged: np.ndarray
    residual_mass: float

    def __post_init__(self):
        total = float(np.sum(self.flagged ** 2)) + self.residual_mass
        if abs(total - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"Flagged plus residual mass is {total!r}, not 1.")


def apply_svt(o, poly, amplitudes=None, label="svt"):
    """
    Applies `poly` to the singular values sqrt(p_i) of the oracle block.

    `amplitudes` is the input amplitude on each outcome (defaults to sqrt(p_i), the oracle
    state); flagged[i] = amplitudes[i] * poly(sqrt(p_i)). Charges poly.degree queries.
    """
    if not poly.certified:
        raise UncertifiedPolynomialError(
            f"Refusing to transform with an uncertified polynomial: {first_failure(poly)}"
        )
    singular_values = o.singular_values()
    if amplitudes is None:
        amplitudes = singular_values
    amplitudes = np.asarray(amplitudes, dtype=float)
    if amplitudes.shape != singular_values.shape:
        raise ValueError("One input amplitude per outcome is required.")
    norm = float(np.sum(amplitudes ** 2))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"Input amplitudes have squared norm {norm!r}, not 1.")

    flagged = amplitudes * eval_poly(poly, singular_values)
    residual = norm - float(np.sum(flagged ** 2))
    o.charge(label, "svt_degree", poly.degree)
    return FlaggedAmplitudes(flagged=flagged, residual_mass=residual)


def power_sum(f):
    """sum_i flagged[i]^2."""
    return float(np.sum(f.flagged ** 2))
