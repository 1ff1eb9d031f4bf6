import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SUCCESS_PROBABILITY = 8.0 / math.pi ** 2


class NoOverlapError(ValueError):
    pass


def chebyshev_T(n, z):
    """T_n(z) for real z; n may be fractional when z >= 1."""
    z = np.asarray(z, dtype=float)
    z_clip = np.clip(z, -1.0, 1.0)
    inside = np.abs(z) <= 1.0
    out = np.empty_like(z)
    out[inside] = np.cos(n * np.arccos(z_clip[inside]))
    if np.any(~inside):
        zabs = np.abs(z[~inside])
        with np.errstate(over="ignore"):
            out[~inside] = np.cosh(n * np.arccosh(zabs)) * (np.sign(z[~inside]) ** n)
    return out


@dataclass(frozen=True)
class AmplifyResult:
    """
    `fidelity_sq` is the exact success probability of the simulated schedule at the true
    overlap; `guaranteed_fidelity_sq` = 1 - delta_L^2 holds for every overlap >= the
    lower bound the schedule was built for.
    """

    fidelity_sq: float
    L: int
    lambda_: float
    delta: float
    schedule_delta: float
    guaranteed_fidelity_sq: float

    @property
    def deficit(self):
        return 1.0 - self.fidelity_sq


def amplification_rounds(lam, delta, cost_constant=1.0):
    """L = ceil(c log2(2/delta) / sqrt(lambda)), made odd."""
    rounds = int(math.ceil(cost_constant * math.log2(2.0 / delta) / math.sqrt(lam)))
    rounds = max(rounds, 1)
    return rounds if rounds % 2 == 1 else rounds + 1


def schedule_delta(lam, rounds):
    """Smallest delta whose L-round fixed-point schedule covers every overlap >= lam."""
    if lam >= 1.0:
        return 0.0
    growth = rounds * math.acosh(1.0 / math.sqrt(1.0 - lam))
    if growth > 700.0:
        return 0.0
    return 1.0 / math.cosh(growth)


def amplified_fidelity(lam, rounds):
    """Success probability 1 - delta_L^2 of the L-round schedule tuned to overlap lam."""
    return 1.0 - schedule_delta(lam, rounds) ** 2


def fixed_point_amplify(
    lam, delta, cost_constant=1.0, lambda_lower=None, rounds=None, ledger=None, round_cost=0, label="amplify"
):
    """
    Fixed-point amplitude amplification on the two-dimensional target/non-target span.

    Args:
        lam: True initial overlap squared |<T|S>|^2.
        delta: Requested fidelity loss; the result satisfies fidelity_sq >= 1 - delta^2
            whenever lam >= lambda_lower.
        lambda_lower: Overlap bound the schedule is built for (defaults to lam).
        rounds: Explicit odd round count, at least the formula's.
        ledger: When given, rounds * round_cost queries are charged.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}.")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}.")
    lower = lam if lambda_lower is None else lambda_lower
    if lam == 0.0 or lower <= 0.0:
        raise NoOverlapError("Amplification needs a nonzero overlap with the target.")
    lower = min(lower, 1.0)

    formula_rounds = amplification_rounds(lower, delta, cost_constant)
    if rounds is None:
        rounds = formula_rounds
    elif rounds % 2 != 1 or rounds < formula_rounds:
        raise ValueError(f"rounds must be odd and >= {formula_rounds}, got {rounds}.")

    sched = schedule_delta(lower, rounds)
    if lower >= 1.0 or sched == 0.0:
        fidelity = 1.0 if lam >= lower else 1.0 - sched ** 2
    else:
        ratio = math.sqrt((1.0 - lam) / (1.0 - lower))
        fidelity = 1.0 - sched ** 2 * float(chebyshev_T(rounds, ratio)) ** 2
    fidelity = min(1.0, max(0.0, fidelity))

    if ledger is not None:
        ledger.charge(label, "fixed_point_rounds", rounds * round_cost)
    return AmplifyResult(
        fidelity_sq=fidelity,
        L=rounds,
        lambda_=lam,
        delta=delta,
        schedule_delta=sched,
        guaranteed_fidelity_sq=1.0 - sched ** 2,
    )


def fixed_point_phases(rounds, delta):
    """Phase pairs (alpha_j, beta_j), j = 1..(L-1)/2, with beta_{l-j+1} = -alpha_j."""
    if rounds % 2 != 1:
        raise ValueError("L must be odd.")
    half = (rounds - 1) // 2
    gamma = 1.0 / float(chebyshev_T(1.0 / rounds, 1.0 / delta))
    s = math.sqrt(1.0 - gamma ** 2)
    alphas = np.array([2.0 * math.atan2(1.0, math.tan(2.0 * math.pi * j / rounds) * s) for j in range(1, half + 1)])
    return alphas, -alphas[::-1]


def fixed_point_trajectory(lam, rounds, delta):
    """
    Target probability after each generalized Grover iterate, from explicit 2x2 products.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}.")
    alphas, betas = fixed_point_phases(rounds, delta)
    start = np.array([math.sqrt(1.0 - lam), math.sqrt(lam)], dtype=complex)
    reflector = np.outer(start, start.conj())
    target = np.diag([0.0, 1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)

    state = start.copy()
    probabilities = [abs(state[1]) ** 2]
    for alpha, beta in zip(alphas, betas):
        s_s = eye - (1.0 - np.exp(-1j * alpha)) * reflector
        s_t = eye - (1.0 - np.exp(1j * beta)) * target
        state = -s_s @ s_t @ state
        probabilities.append(abs(state[1]) ** 2)
    return np.array(probabilities)


def final_success_probability(lam, rounds, delta):
    """Closed form 1 - delta^2 T_L(T_{1/L}(1/delta) sqrt(1 - lambda))^2."""
    gamma_inv = float(chebyshev_T(1.0 / rounds, 1.0 / delta))
    return 1.0 - delta ** 2 * float(chebyshev_T(rounds, gamma_inv * math.sqrt(1.0 - lam))) ** 2


@dataclass(frozen=True)
class QaeOutcome:
    estimate: float
    M: int
    true_amp: float
    grid_index: int


def _check_grid(M):
    if int(M) != M or M < 2 or (int(M) & (int(M) - 1)) != 0:
        raise ValueError(f"M must be a power of two >= 2, got {M}.")


def _check_amplitude(a):
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"Amplitude must lie in [0, 1], got {a}.")


def qae_error_bound(a, M):
    return 2.0 * math.pi * math.sqrt(a * (1.0 - a)) / M + math.pi ** 2 / M ** 2


def qae_grid_size(target, a_bound=1.0, max_power=40):
    """Smallest power-of-two M whose error bound is <= target for every a <= a_bound."""
    if target <= 0:
        raise ValueError(f"Target error must be positive, got {target}.")
    a_worst = min(max(a_bound, 0.0), 0.5)
    for power in range(1, max_power + 1):
        M = 2 ** power
        if qae_error_bound(a_worst, M) <= target:
            return M
    raise ValueError(f"No grid up to 2^{max_power} reaches error {target}.")


@lru_cache(maxsize=4096)
def _qae_table(a, M):
    theta = math.asin(math.sqrt(a)) / math.pi
    outcomes = np.arange(M)

    def fejer(delta):
        s = np.sin(np.pi * delta)
        small = np.abs(s) < 1e-12
        safe = np.where(small, 1.0, s)
        return np.where(small, 1.0, (np.sin(M * np.pi * delta) / (M * safe)) ** 2)

    raw = 0.5 * (fejer(outcomes / M - theta) + fejer(outcomes / M + theta))
    grid = np.arange(M // 2 + 1)
    probs = raw[grid].copy()
    mirrored = M - grid[1 : M // 2]
    probs[1 : M // 2] += raw[mirrored]
    estimates = np.sin(np.pi * grid / M) ** 2
    cdf = np.cumsum(probs)
    for array in (estimates, probs, cdf):
        array.setflags(write=False)
    return estimates, probs, cdf


def qae_distribution(a, M):
    """
    Exact outcome distribution of canonical amplitude estimation with M grid points,
    merged onto the estimates sin^2(pi j / M), j = 0..M/2.
    """
    _check_amplitude(a)
    _check_grid(M)
    estimates, probs, _ = _qae_table(float(a), int(M))
    return pd.DataFrame({"j": np.arange(len(probs)), "estimate": estimates, "probability": probs})


def coverage(a, M):
    """Probability mass within the error bound of a."""
    frame = qae_distribution(a, M)
    inside = np.abs(frame["estimate"] - a) <= qae_error_bound(a, M)
    return float(frame.loc[inside, "probability"].sum())


def _sample_indices(a, M, rng, size):
    _, _, cdf = _qae_table(float(a), int(M))
    draws = rng.random(size)
    return np.minimum(np.searchsorted(cdf, draws * cdf[-1], side="right"), len(cdf) - 1)


def qae_estimate(a, M, seed, ledger=None, unit_cost=1, label="qae"):
    """One sampled amplitude estimate; charges M * unit_cost queries when a ledger is given."""
    _check_amplitude(a)
    _check_grid(M)
    rng = np.random.default_rng(seed)
    index = int(_sample_indices(a, M, rng, 1)[0])
    estimates, _, _ = _qae_table(float(a), int(M))
    if ledger is not None:
        ledger.charge(label, "qae_grid", M * unit_cost)
    return QaeOutcome(estimate=float(estimates[index]), M=int(M), true_amp=float(a), grid_index=index)


def boosted_estimate(a, M, rounds, seed, ledger=None, unit_cost=1, label="qae"):
    """Median of `rounds` (odd) independent estimates; charges rounds * M * unit_cost."""
    if int(rounds) != rounds or rounds < 1 or rounds % 2 != 1:
        raise ValueError(f"rounds must be a positive odd integer, got {rounds}.")
    _check_amplitude(a)
    _check_grid(M)
    rng = np.random.default_rng(seed)
    estimates, _, _ = _qae_table(float(a), int(M))
    draws = estimates[_sample_indices(a, M, rng, int(rounds))]
    if ledger is not None:
        ledger.charge(label, "qae_grid", int(rounds) * M * unit_cost)
    return float(np.median(draws))
