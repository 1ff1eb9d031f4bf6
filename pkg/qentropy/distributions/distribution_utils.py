import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-12

FAMILIES = ("uniform", "point", "zipf", "two_point", "dyadic", "explicit")


@dataclass(frozen=True)
class Distribution:
    """
    A finite probability vector over outcomes 1..n.

    Inputs are validated, never renormalized: negative masses or a total further than
    1e-12 from one raise a ValueError.
    """

    probs: tuple
    n: int = None

    def __post_init__(self):
        probs = tuple(float(p) for p in np.asarray(self.probs, dtype=float).ravel())
        object.__setattr__(self, "probs", probs)
        if self.n is None:
            object.__setattr__(self, "n", len(probs))
        if len(probs) == 0:
            raise ValueError("A distribution needs at least one outcome.")
        if self.n != len(probs):
            raise ValueError(f"n={self.n} does not match {len(probs)} probabilities.")
        if any(not math.isfinite(p) or p < 0 for p in probs):
            raise ValueError("Probabilities must be finite and nonnegative.")
        total = math.fsum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"Probabilities sum to {total!r}, not 1 within {NORMALIZATION_TOLERANCE}.")

    @property
    def array(self):
        return np.asarray(self.probs, dtype=float)

    def support_sqrt(self):
        """Square roots of the masses, i.e. the singular values of the oracle block."""
        return np.sqrt(self.array)

    def permuted(self, permutation):
        return Distribution(self.array[np.asarray(permutation)])


def shannon_entropy(d):
    """Entropy in bits with 0·log2(0) = 0."""
    if not isinstance(d, Distribution):
        d = Distribution(d)
    return float(-np.sum(xlogy(d.array, d.array)) / math.log(2))


def binary_entropy(x):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy expects x in [0, 1], got {x}.")
    return float(-(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / math.log(2))


def _uniform(n):
    return np.full(n, 1.0 / n)


def _point(n, index=0):
    if not 0 <= index < n:
        raise ValueError(f"point index {index} outside 0..{n - 1}.")
    probs = np.zeros(n)
    probs[index] = 1.0
    return probs


def _zipf(n, s=1.0):
    if s <= 0:
        raise ValueError(f"zipf exponent must be > 0, got {s}.")
    weights = 1.0 / np.arange(1, n + 1, dtype=float) ** s
    return weights / math.fsum(weights)


def _two_point(n, masses=(0.64, 0.36)):
    if n < 2:
        raise ValueError("two_point needs n >= 2.")
    if len(masses) != 2:
        raise ValueError("two_point needs exactly two masses.")
    probs = np.zeros(n)
    probs[:2] = masses
    return probs


def _dyadic(n):
    # 1/2, 1/4, ..., 2^-(n-1), 2^-(n-1)
    probs = np.ldexp(1.0, -np.arange(1, n + 1))
    probs[-1] = probs[-2] if n > 1 else 1.0
    return probs


def _explicit(n, probs=None):
    if probs is None:
        raise ValueError("explicit family needs 'probs'.")
    probs = np.asarray(probs, dtype=float)
    if len(probs) != n:
        raise ValueError(f"explicit probs have length {len(probs)}, expected {n}.")
    return probs


_BUILDERS = {
    "uniform": _uniform,
    "point": _point,
    "zipf": _zipf,
    "two_point": _two_point,
    "dyadic": _dyadic,
    "explicit": _explicit,
}


def make_distribution(family, n, **params):
    """
    Builds a Distribution from a named family.

    Args:
        family: One of uniform, point, zipf, two_point, dyadic, explicit.
        n: Support size (>= 1).
        **params: Family parameters (`index` for point, `s` for zipf, `masses` for two_point,
            `probs` for explicit).
    """
    if family not in _BUILDERS:
        raise ValueError(f"Unknown distribution family '{family}'. Choose from {', '.join(FAMILIES)}.")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}.")
    return Distribution(_BUILDERS[family](int(n), **params))


def read_distribution_file(path):
    """Reads one decimal probability per line; '#' starts a comment."""
    probs = []
    with open(path, "r") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                probs.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{line_number}: '{line}' is not a probability.")
    logger.info(" Read %d probabilities from %s", len(probs), path)
    return Distribution(probs)
