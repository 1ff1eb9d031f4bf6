import logging
import math
from functools import lru_cache

import numpy as np
from scipy.fft import dct
from scipy.special import erf, erfcinv

from qentropy.polyapprox.bounded_poly import (
    DEGREE_CONSTANT,
    BoundedPoly,
    PolynomialConstructionError,
    certify_poly,
    first_failure,
    one_clause_bound,
)

logger = logging.getLogger(__name__)

INITIAL_NODES = 256


def chebyshev_interpolate(func, size, parity):
    """
    Chebyshev coefficients of the interpolant of `func` at `size` first-kind nodes.

    Coefficients of the wrong parity are zeroed.
    """
    nodes = np.cos(np.pi * (np.arange(size) + 0.5) / size)
    coeffs = dct(func(nodes), type=2) / size
    coeffs[0] /= 2.0
    if parity == "even":
        coeffs[1::2] = 0.0
    else:
        coeffs[0::2] = 0.0
    return coeffs


def truncation_degree(coeffs, tol, parity):
    """Smallest degree d with sum_{j>d} |c_j| <= tol."""
    tails = np.append(np.cumsum(np.abs(coeffs)[::-1])[::-1][1:], 0.0)
    degree = int(np.flatnonzero(tails <= tol)[0])
    if parity == "odd" and degree % 2 == 0:
        degree += 1
    return degree


def fit_bounded_poly(func, parity, tol, budget, kind, params):
    """
    Interpolates `func`, truncates at the smallest degree whose coefficient tail is within
    `tol`, then certifies the result against the certificates of `kind`.

    Raises PolynomialConstructionError when the degree would exceed `budget` or the
    certificates fail.
    """
    # budget / DEGREE_CONSTANT tracks 1/phi (1/beta), so the first grid already resolves the transition
    size = max(INITIAL_NODES, 1 << int(math.ceil(math.log2(8.0 * budget / DEGREE_CONSTANT))))
    while True:
        coeffs = chebyshev_interpolate(func, size, parity)
        if np.sum(np.abs(coeffs[3 * size // 4 :])) <= 1e-3 * tol:
            break
        if size > 4 * budget:
            tails = np.cumsum(np.abs(coeffs)[::-1])[::-1]
            achieved = float(tails[min(budget + 1, len(tails) - 1)])
            raise PolynomialConstructionError(
                f"{kind} polynomial {params} does not resolve within degree budget {budget}.",
                achieved_error=achieved,
                degree=budget,
            )
        size *= 2

    degree = truncation_degree(coeffs, tol, parity)
    if degree > budget:
        achieved = float(np.sum(np.abs(coeffs[budget + 1 :])))
        raise PolynomialConstructionError(
            f"{kind} polynomial {params} needs degree {degree} > budget {budget}.",
            achieved_error=achieved,
            degree=degree,
        )

    poly = BoundedPoly(
        coeffs=coeffs[: degree + 1], parity=parity, kind=kind, params=dict(params), budget=budget
    )
    poly = certify_poly(poly, rescale=True)
    if not poly.certified:
        excess = [entry.achieved - entry.bound for entry in poly.cert if not entry.passed]
        raise PolynomialConstructionError(
            f"{kind} polynomial {params} failed certification: {first_failure(poly)}",
            achieved_error=max(excess) if excess else poly.sup_norm,
            degree=degree,
        )
    logger.info(" Built %s polynomial %s with degree %d (budget %d)", kind, params, degree, budget)
    return poly


def _lower_window(lo, z):
    # ~0 for |x| <= lo/2, ~1 for |x| >= lo
    width = (lo / 4.0) / z
    center = 0.75 * lo
    return lambda x: 0.5 * (erf((x - center) / width) - erf((x + center) / width)) + 1.0


def _upper_window(hi, z):
    # ~1 for |x| <= hi, ~0 for |x| >= 1 - (1 - hi)/2
    gap = 1.0 - hi
    width = (gap / 4.0) / z
    center = 1.0 - 0.75 * gap
    return lambda x: 0.5 * (erf((center - x) / width) + erf((center + x) / width))


def windowed_target(target, lo, hi, tail):
    """
    Even extension of `target` from [lo, hi] to [-1, 1]: the target evaluated at a clipped
    argument, multiplied by erf windows that are within `tail` of 1 on [lo, hi].
    """
    z = float(erfcinv(2.0 * tail))
    lower = _lower_window(lo, z)
    clip_lo = lo / 4.0
    if hi < 1.0:
        upper = _upper_window(hi, z)
        clip_hi = 1.0 - (1.0 - hi) / 4.0
    else:
        upper = None
        clip_hi = 1.0

    def func(x):
        values = lower(x) * target(np.clip(np.abs(x), clip_lo, clip_hi))
        if upper is not None:
            values = values * upper(x)
        return values

    return func


def _log_budget(scale, log_argument):
    return int(math.ceil(DEGREE_CONSTANT * scale * max(1.0, math.log2(log_argument))))


@lru_cache(maxsize=256)
def approx_sqrt_log(beta, eta):
    """
    Even polynomial within eta of sqrt(log(1/x)) / (2 sqrt(log(1/beta))) on [beta, 1 - beta].
    """
    if not 0.0 < beta <= 0.5:
        raise ValueError(f"beta must lie in (0, 1/2], got {beta}.")
    if not 0.0 < eta <= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2], got {eta}.")
    norm = 2.0 * math.sqrt(math.log2(1.0 / beta))
    target = windowed_target(lambda x: np.sqrt(np.log2(1.0 / x)) / norm, beta, 1.0 - beta, eta / 4.0)
    budget = _log_budget(1.0 / beta, 1.0 / (beta * eta))
    return fit_bounded_poly(target, "even", eta / 2.0, budget, "sqrt_log", {"beta": beta, "eta": eta})


@lru_cache(maxsize=256)
def make_Sk(k, eta):
    """
    Even polynomial within eta of sqrt(log2(2/x)) / (2 sqrt(k + 1)) on [2^-k, 1].
    """
    if int(k) != k or k < 1:
        raise ValueError(f"level k must be a positive integer, got {k}.")
    if not 0.0 < eta <= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2], got {eta}.")
    k = int(k)
    phi_k = math.ldexp(1.0, -k)
    norm = 2.0 * math.sqrt(k + 1)
    target = windowed_target(lambda x: np.sqrt(np.log2(2.0 / x)) / norm, phi_k, 1.0, eta / 4.0)
    budget = _log_budget(2.0 ** (k + 1), 2.0 ** (k + 1) / eta)
    return fit_bounded_poly(target, "even", eta / 2.0, budget, "level_sqrt_log", {"k": k, "eta": eta})


def step_target(phi, eps):
    """
    Smoothed threshold: within eps of 0 on [0, phi] and within 1 - sqrt(1 - eps^2) of 1
    beyond 2 phi, with values in [0, 1].
    """
    u = one_clause_bound(eps)
    floor = u / 3.0
    z = float(erfcinv(2.0 * u / 6.0))
    width = (phi / 2.0) / z
    center = 1.5 * phi

    def func(x):
        bump = 0.5 * (erf((x - center) / width) - erf((x + center) / width)) + 1.0
        return floor + (1.0 - 2.0 * floor) * bump

    return func, u / 4.0


@lru_cache(maxsize=256)
def make_step_poly(phi, eps):
    """
    Even polynomial b with b in [0, 1] on [0, 1], b <= eps on [0, phi] and
    b >= sqrt(1 - eps^2) on [2 phi, 1].
    """
    if not 0.0 < phi <= 1.0:
        raise ValueError(f"phi must lie in (0, 1], got {phi}.")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}.")
    target, tol = step_target(phi, eps)
    budget = _log_budget(1.0 / phi, 1.0 / eps)
    return fit_bounded_poly(target, "even", tol, budget, "step", {"phi": phi, "eps": eps})


def degree_law_exponent(polys, scales):
    """
    Least-squares slope of log2(degree) against log2(scale) for polynomials built at one
    accuracy, where scale is 1/phi (1/beta, 1/phi_{k+1}). A degree law C * scale * log(...)
    gives an exponent near 1; the log factors change little across a family and are not divided out.
    """
    degrees = np.array([poly.degree for poly in polys], dtype=float)
    scales = np.asarray(scales, dtype=float)
    if len(degrees) != len(scales) or len(degrees) < 2:
        raise ValueError("Need at least two polynomials, one scale each.")
    if np.any(degrees <= 0):
        raise ValueError("Degree law fits need polynomials of positive degree.")
    slope, _ = np.polyfit(np.log2(scales), np.log2(degrees), 1)
    return float(slope)
