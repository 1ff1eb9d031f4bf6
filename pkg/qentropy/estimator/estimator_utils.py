import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd

from qentropy.amplitude import qae_grid_size
from qentropy.distributions import Distribution
from qentropy.oracle_svt import OracleModel, apply_svt, power_sum
from qentropy.polyapprox import eval_poly, make_Sk
from qentropy.separation import branch_mass, build_cascade, cascade_state, cascade_table, query_cost_Uk

logger = logging.getLogger(__name__)


@dataclass
class EstimatorParams:
    """
    Schedule for one entropy estimate: m = ceil(log2(2n/eps)) levels, separation error
    delta = sqrt(eps/(4m)) and polynomial error eta = eps/4.
    """

    n: int
    eps: float
    m: int
    delta: float
    eta: float
    qae_M_per_level: dict = field(default_factory=dict)
    boost_rounds: int = 7
    cost_constant: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}.")
        if not 0.0 < self.delta <= 0.5 or not 0.0 < self.eta <= 0.5:
            raise ValueError(f"delta={self.delta} and eta={self.eta} must lie in (0, 1/2].")
        if self.boost_rounds < 1 or self.boost_rounds % 2 != 1:
            raise ValueError(f"boost_rounds must be a positive odd integer, got {self.boost_rounds}.")

    def level_eta(self, k):
        # S_k^2 enters v with weight 8(k+1)
        return self.eta / (8 * (k + 1))

    @property
    def budget_levels(self):
        """
        Levels sharing the error budget: the schedule's m at eps = 1. Deeper bands only hold
        probabilities below 1/(4 n^2).
        """
        return levels_for(self.n, 1.0)

    def amplitude_bound(self, k):
        """Upper bound on Sum(k): the mass of the bands near level k plus the leakage from above."""
        delta_sq = self.delta ** 2
        return min(1.0, 16.0 * self.n / 4.0 ** k * (1.0 + 5.0 * delta_sq) + delta_sq ** 2)

    def unresolvable(self, k):
        """True when Sum(k) is bounded by the screening error, so screening cannot tell it from 0."""
        return self.amplitude_bound(k) <= self.screen_error

    @property
    def screen_error(self):
        return self.eps / (2 * self.budget_levels)

    def skip_cutoff(self, k):
        # a level below the cutoff contributes at most eps / (4 budget_levels) to v
        return self.eps / (8 * self.budget_levels * (k + 1))

    def vprime_bound(self, k):
        return min(1.0, (0.5 + self.level_eta(k)) ** 2)

    def sum_error(self, k):
        """eps / (2 L (k + 1)) with L = budget_levels; (k + 1) is the level's weight in v."""
        return self.eps / (2 * self.budget_levels * (k + 1))

    def vprime_error(self, k, sum_estimate):
        return self.eps / (2 * self.budget_levels * (k + 1) * sum_estimate)

    @property
    def amplification_delta(self):
        return self.eps / (8 * self.budget_levels)


def levels_for(n, eps):
    return max(1, int(math.ceil(math.log2(2.0 * n / eps))))


def choose_params(n, eps, boost_rounds=7, cost_constant=1.0):
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}.")
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}.")
    m = levels_for(n, eps)
    params = EstimatorParams(
        n=int(n),
        eps=float(eps),
        m=m,
        delta=math.sqrt(eps / (4 * m)),
        eta=eps / 4.0,
        boost_rounds=boost_rounds,
        cost_constant=cost_constant,
    )
    params.qae_M_per_level = {
        k: qae_grid_size(params.screen_error, params.amplitude_bound(k)) for k in range(1, m + 1)
    }
    return params


def error_envelope(params, constant=8.0):
    """constant * (m^2 delta^2 + eta + n 2^-m (m + 1))."""
    m = params.m
    return constant * (m * m * params.delta ** 2 + params.eta + params.n * 2.0 ** -m * (m + 1))


def exact_level_values(d, params):
    """v_k = (k + 1) sum_i p_i S_k(sqrt p_i)^2 B_k(sqrt p_i)^2 for k = 1..m, summed directly."""
    cfg = build_cascade(params.m, params.delta)
    probs = d.array
    x = np.sqrt(probs)
    table = cascade_table(cfg, x)
    values = np.empty(params.m)
    for k in range(1, params.m + 1):
        s_k = eval_poly(make_Sk(k, params.level_eta(k)), x)
        values[k - 1] = (k + 1) * np.sum(probs * s_k ** 2 * table.B[k - 1] ** 2)
    return values


def exact_v(d, params):
    if not isinstance(d, Distribution):
        d = Distribution(d)
    return float(-2.0 + 8.0 * np.sum(exact_level_values(d, params)))


@dataclass(frozen=True, eq=False)
class LevelTable:
    """Simulation-side truth per level: Sum(k), v'_k and the oracle cost of U_k and S_k."""

    sums: np.ndarray
    vprimes: np.ndarray
    cascade_costs: np.ndarray
    sk_degrees: np.ndarray


@lru_cache(maxsize=64)
def level_table(d, m, delta, eta):
    cfg = build_cascade(m, delta)
    scratch = OracleModel(d)
    state = cascade_state(scratch, cfg, m)
    sums = np.array([branch_mass(state, k) for k in range(1, m + 1)])
    vprimes = np.zeros(m)
    sk_degrees = np.zeros(m, dtype=int)
    for k in range(1, m + 1):
        poly = make_Sk(k, eta / (8 * (k + 1)))
        sk_degrees[k - 1] = poly.degree
        if sums[k - 1] > 0.0:
            # the amplified state is the normalized C_k branch
            flagged = apply_svt(scratch, poly, state.branches[k - 1] / math.sqrt(sums[k - 1]))
            vprimes[k - 1] = power_sum(flagged)
    costs = np.array([query_cost_Uk(cfg, k) for k in range(1, m + 1)])
    return LevelTable(sums=sums, vprimes=vprimes, cascade_costs=costs, sk_degrees=sk_degrees)


@dataclass
class LevelRecord:
    k: int
    sum_true: float
    sum_screen: float
    M_screen: int
    skipped: bool = False
    sum_est: float = 0.0
    M_sum: int = 0
    vprime_true: float = 0.0
    vprime_est: float = 0.0
    M_vprime: int = 0
    amp_rounds: int = 0
    fidelity_deficit: float = 0.0
    v_k: float = 0.0
    error_budget: float = 0.0
    queries: int = 0


@dataclass
class EstimateReport:
    v_k: np.ndarray
    sum_k: np.ndarray
    v: float
    exact_entropy: float
    abs_error: float
    ledger: object
    params: EstimatorParams
    seed: object
    levels: list = field(default_factory=list)
    method: str = "main"
    error_bar: float = 0.0

    @property
    def skipped_levels(self):
        return [record.k for record in self.levels if record.skipped]

    @property
    def queries_total(self):
        return self.ledger.total

    @property
    def success(self):
        return self.abs_error <= self.params.eps

    def to_frame(self):
        rows = [dict(record.__dict__) for record in self.levels]
        summary = {
            "k": "summary",
            "v_k": self.v,
            "exact_entropy": self.exact_entropy,
            "abs_error": self.abs_error,
            "error_bar": self.error_bar,
            "queries": self.queries_total,
        }
        columns = list(LevelRecord.__dataclass_fields__) + ["exact_entropy", "abs_error", "error_bar"]
        return pd.DataFrame(rows + [summary], columns=columns)

    def to_csv(self, path=None):
        return self.to_frame().to_csv(path, index=False)

    def to_text(self):
        p = self.params
        lines = [
            f"method          {self.method}",
            f"n               {p.n}",
            f"eps             {p.eps:g}",
            f"m               {p.m}",
            f"delta           {p.delta:.6g}",
            f"eta             {p.eta:.6g}",
            f"seed            {self.seed}",
            f"estimate        {self.v:.6f}",
            f"exact entropy   {self.exact_entropy:.6f}",
            f"abs error       {self.abs_error:.6f}",
            f"error bar       {self.error_bar:.6f}",
            f"queries         {self.queries_total}",
        ]
        if self.levels:
            lines.append("")
            lines.append(f"{'k':>3} {'Sum(k)':>12} {'v_k':>12} {'M':>8} {'L':>8} {'queries':>14}  note")
            for r in self.levels:
                note = "skipped" if r.skipped else ""
                lines.append(
                    f"{r.k:>3} {r.sum_est if not r.skipped else r.sum_screen:>12.6g} {r.v_k:>12.6g} "
                    f"{max(r.M_screen, r.M_sum, r.M_vprime):>8} {r.amp_rounds:>8} {r.queries:>14}  {note}"
                )
        return "\n".join(lines)
