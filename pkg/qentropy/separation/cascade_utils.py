import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from qentropy.polyapprox import DEGREE_CONSTANT, eval_poly, make_step_poly

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10


def threshold(j):
    """phi_j = 2^-j."""
    return math.ldexp(1.0, -j)


@dataclass(frozen=True, eq=False)
class CascadeConfig:
    m: int
    eps: float
    step_polys: tuple

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}.")
        object.__setattr__(self, "step_polys", tuple(self.step_polys))
        if len(self.step_polys) != self.m:
            raise ValueError(f"Expected {self.m} threshold polynomials, got {len(self.step_polys)}.")
        for j, poly in enumerate(self.step_polys, start=1):
            if poly.kind != "step" or poly.params.get("phi") != threshold(j) or poly.params.get("eps") != self.eps:
                raise ValueError(f"Level {j} polynomial is not certified for (phi={threshold(j)}, eps={self.eps}).")
            if not poly.certified:
                raise ValueError(f"Level {j} threshold polynomial is not certified.")

    @property
    def thresholds(self):
        return tuple(threshold(j) for j in range(1, self.m + 1))

    def step_poly(self, j):
        check_level(self.m, j)
        return self.step_polys[j - 1]


@lru_cache(maxsize=64)
def build_cascade(m, eps):
    logger.info(" Building %d threshold polynomials with eps=%g", m, eps)
    return CascadeConfig(m=m, eps=eps, step_polys=tuple(make_step_poly(threshold(j), eps) for j in range(1, m + 1)))


def check_level(m, j):
    if int(j) != j or not 1 <= j <= m:
        raise ValueError(f"Level {j} outside 1..{m}.")


def _step_values(poly, x):
    return np.clip(eval_poly(poly, x), 0.0, 1.0)


def beta_coefficients(cfg, x, j):
    """(beta_j(x), beta'_j(x)) with beta'_j = sqrt(1 - beta_j^2)."""
    check_level(cfg.m, j)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}.")
    beta = float(_step_values(cfg.step_poly(j), x))
    return beta, math.sqrt(1.0 - beta * beta)


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Per-level coefficients at points x; rows are levels 1..m, columns are points."""

    x: np.ndarray
    beta: np.ndarray
    beta_prime: np.ndarray
    B: np.ndarray
    B_prime: np.ndarray

    @property
    def m(self):
        return self.beta.shape[0]

    def column(self, x):
        matches = np.flatnonzero(self.x == x)
        if matches.size == 0:
            raise ValueError(f"x={x} is not a tabulated point.")
        return int(matches[0])


def cascade_table(cfg, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("Cascade points must lie in [0, 1].")
    beta = np.vstack([_step_values(poly, x) for poly in cfg.step_polys])
    beta_prime = np.sqrt(1.0 - beta ** 2)
    B_prime = np.cumprod(beta_prime, axis=0)
    B = np.vstack([np.ones_like(x), B_prime[:-1]]) * beta
    return CoefficientTable(x=x, beta=beta, beta_prime=beta_prime, B=B, B_prime=B_prime)


@dataclass(frozen=True, eq=False)
class StructuredState:
    """
    Branch j holds amplitudes sqrt(p_i) B_j(sqrt(p_i)) under control label j; the residual
    holds sqrt(p_i) B'_k(sqrt(p_i)). Garbage registers are orthogonal labels, never vectors.
    """

    k: int
    branches: np.ndarray
    residual: np.ndarray

    def __post_init__(self):
        total = self.total_norm_sq
        if abs(total - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"Structured state has squared norm {total!r}.")

    @property
    def masses(self):
        return np.sum(self.branches ** 2, axis=1)

    @property
    def residual_mass(self):
        return float(np.sum(self.residual ** 2))

    @property
    def total_norm_sq(self):
        return float(np.sum(self.branches ** 2)) + self.residual_mass


def query_cost_Uk(cfg, k):
    check_level(cfg.m, k)
    return sum(poly.degree for poly in cfg.step_polys[:k])


def cost_envelope(cfg, k, constant=DEGREE_CONSTANT):
    """Upper bound 2 C 2^k max(1, log2(1/eps)) implied by the per-level degree budgets."""
    return 2 * constant * 2 ** k * max(1.0, math.log2(1.0 / cfg.eps))


def cascade_state(o, cfg, k, table=None):
    check_level(cfg.m, k)
    singular_values = o.singular_values()
    if table is None:
        table = cascade_table(cfg, singular_values)
    state = StructuredState(
        k=k,
        branches=singular_values * table.B[:k],
        residual=singular_values * table.B_prime[k - 1],
    )
    o.charge(f"U_{k}", "cascade_cost", query_cost_Uk(cfg, k))
    return state


def branch_mass(s, j):
    """Sum(j) = sum_i p_i B_j(sqrt(p_i))^2."""
    check_level(s.k, j)
    return float(s.masses[j - 1])


def level_of(x):
    """The level j with x in [phi_j, phi_{j-1}); x = 1 belongs to level 1."""
    _, exponent = math.frexp(x)
    return max(1, 1 - exponent)


def _next_level_mass(table, col, j):
    # past the last level the unseparated remainder plays the role of B_{m+1}
    if j < table.m:
        return table.B[j, col] ** 2
    return table.B_prime[table.m - 1, col] ** 2


def check_concentration(table, x, eps, constant=4.0):
    """
    Returns (j_star, B_j*(x)^2 + B_j*+1(x)^2, mass >= 1 - constant j_star eps^2).
    """
    if not threshold(table.m) <= x <= 1.0:
        raise ValueError(f"x={x} lies outside [phi_m, 1] = [{threshold(table.m)}, 1].")
    col = table.column(x)
    j_star = level_of(x)
    mass = float(table.B[j_star - 1, col] ** 2 + _next_level_mass(table, col, j_star))
    return j_star, mass, mass >= 1.0 - constant * j_star * eps ** 2


def misplaced_mass(table, x):
    """sum of B_l(x)^2 over levels l other than j* and j* + 1."""
    col = table.column(x)
    j_star = level_of(x)
    keep = {j_star - 1, j_star}
    return float(sum(table.B[l, col] ** 2 for l in range(table.m) if l not in keep))


def simulate_branches(cfg, x, k):
    """
    Level-by-level application of the separation map to one singular value x.

    Returns a dict from control label j to the branch amplitude, plus the amplitude left
    unseparated after level k.
    """
    check_level(cfg.m, k)
    branches = {}
    remainder = 1.0
    for j in range(1, k + 1):
        beta, beta_prime = beta_coefficients(cfg, x, j)
        rotation = np.array([[beta_prime, -beta], [beta, beta_prime]])
        remainder, branches[j] = rotation @ np.array([remainder, 0.0])
    return branches, float(remainder)


def concentration_report(cfg, xs, constant=4.0):
    table = cascade_table(cfg, xs)
    rows = []
    for x in table.x:
        if x < threshold(cfg.m):
            continue
        j_star, mass, ok = check_concentration(table, x, cfg.eps, constant)
        rows.append(
            {
                "x": x,
                "j_star": j_star,
                "mass": mass,
                "limit": 1.0 - constant * j_star * cfg.eps ** 2,
                "misplaced": misplaced_mass(table, x),
                "ok": ok,
            }
        )
    return pd.DataFrame(rows)


def threshold_report(cfg, xs):
    """Worst beta below phi_j and worst beta' above 2 phi_j, per level."""
    table = cascade_table(cfg, xs)
    rows = []
    for j in range(1, cfg.m + 1):
        below = table.x <= threshold(j)
        above = table.x >= 2 * threshold(j)
        rows.append(
            {
                "level": j,
                "max_beta_below": float(table.beta[j - 1, below].max()) if below.any() else 0.0,
                "max_beta_prime_above": float(table.beta_prime[j - 1, above].max()) if above.any() else 0.0,
                "eps": cfg.eps,
            }
        )
    return pd.DataFrame(rows)


def export_table_csv(table, path=None):
    rows = [
        (level + 1, i, table.beta[level, i], table.beta_prime[level, i], table.B[level, i], table.B_prime[level, i])
        for level in range(table.m)
        for i in range(len(table.x))
    ]
    frame = pd.DataFrame(rows, columns=["level", "i", "beta", "beta_prime", "B", "B_prime"])
    return frame.to_csv(path, index=False)


def export_branch_masses_csv(state, path=None):
    rows = [(str(j), mass) for j, mass in enumerate(state.masses, start=1)]
    rows.append(("residual", state.residual_mass))
    return pd.DataFrame(rows, columns=["level", "mass"]).to_csv(path, index=False)
