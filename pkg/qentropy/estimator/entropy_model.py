import logging
import math
import random
import warnings

import numpy as np

from qentropy.amplitude import boosted_estimate, fixed_point_amplify, qae_grid_size
from qentropy.config.sim_args import SimulationArgs
from qentropy.config.utils import sweep_config_to_sweep_values
from qentropy.distributions import Distribution, shannon_entropy
from qentropy.estimator.estimator_utils import (
    EstimateReport,
    LevelRecord,
    choose_params,
    error_envelope,
    exact_v,
    level_table,
)
from qentropy.oracle_svt import OracleModel, apply_svt, power_sum
from qentropy.polyapprox import approx_sqrt_log

try:
    import wandb

    wandb_available = True
except ImportError:
    wandb_available = False

logger = logging.getLogger(__name__)


def _amplitude_estimate(a, M, rounds, seed, ledger, unit_cost, label, exact):
    a = min(1.0, max(0.0, float(a)))
    if exact:
        ledger.charge(label, "qae_grid", rounds * M * unit_cost)
        return a
    return boosted_estimate(a, M, rounds, seed, ledger=ledger, unit_cost=unit_cost, label=label)


def estimate_entropy(o, eps, seed=None, boost_rounds=7, exact_qae=False, skip_small_levels=True, params=None):
    """
    Estimates the Shannon entropy (bits) of the distribution behind oracle `o` to additive
    error eps, charging every simulated query to `o.ledger`.

    Levels whose bound on Sum(k) is below the screening error are skipped outright. The others
    are screened with an amplitude estimate of Sum(k) and skipped when the estimate is at most
    eps / (8 L (k + 1)), L = ceil(log2(2n)) being the number of levels sharing the error budget.
    Surviving levels get a precise Sum(k) estimate, fixed-point amplification of the C_k branch,
    S_k applied by singular value transformation and an amplitude estimate of the flagged
    branch v'_k. The level contributions v_k = (k + 1) v'_k Sum(k) assemble into v = -2 + 8 sum_k v_k.

    Args:
        o: OracleModel for the unknown distribution.
        eps: Target additive error in (0, 1].
        seed: Seed for all sampled amplitude estimates.
        boost_rounds: Odd number of repetitions per amplitude estimate (median taken).
        exact_qae: Replace every amplitude estimate with the exact amplitude. Query charges
            are unchanged.
        skip_small_levels: Disable to keep every level with a nonzero Sum(k).
        params: Precomputed EstimatorParams; chosen from (o.n, eps) when omitted.

    Returns:
        EstimateReport
    """  # noqa: ignore flake8"
    if params is None:
        params = choose_params(o.n, eps, boost_rounds=boost_rounds, cost_constant=o.cost_constant)
    m = params.m
    rounds = params.boost_rounds
    ledger = o.ledger
    truth = level_table(o.dist, m, params.delta, params.eta)
    seeds = np.random.SeedSequence(seed).spawn(3 * m)

    records = []
    v_k = np.zeros(m)
    sum_k = np.zeros(m)
    error_bar = 0.0
    for k in range(1, m + 1):
        before = ledger.total
        cost_uk = int(truth.cascade_costs[k - 1])
        true_sum = float(truth.sums[k - 1])
        M_screen = params.qae_M_per_level[k]
        if skip_small_levels and params.unresolvable(k):
            record = LevelRecord(k=k, sum_true=true_sum, sum_screen=0.0, M_screen=0, skipped=True)
            records.append(record)
            bound = params.amplitude_bound(k)
            error_bar += 8 * (k + 1) * bound * params.vprime_bound(k)
            logger.info(" Level %d skipped: Sum bound %.3g is below the screening error", k, bound)
            continue
        sum_screen = _amplitude_estimate(
            true_sum, M_screen, rounds, seeds[3 * (k - 1)], ledger, cost_uk, f"Sum({k}) screen", exact_qae
        )
        record = LevelRecord(k=k, sum_true=true_sum, sum_screen=sum_screen, M_screen=M_screen)
        records.append(record)

        cutoff = params.skip_cutoff(k)
        if sum_screen <= 0.0 or (skip_small_levels and sum_screen <= cutoff):
            record.skipped = True
            record.queries = ledger.total - before
            error_bar += 8 * (k + 1) * min(1.0, cutoff + params.screen_error) * params.vprime_bound(k)
            logger.info(" Level %d skipped: Sum estimate %.3g <= %.3g", k, sum_screen, cutoff)
            continue

        e_sum = params.sum_error(k)
        a_hi = min(params.amplitude_bound(k), sum_screen + params.screen_error)
        M_sum = qae_grid_size(e_sum, a_hi)
        sum_est = _amplitude_estimate(
            true_sum, M_sum, rounds, seeds[3 * (k - 1) + 1], ledger, cost_uk, f"Sum({k})", exact_qae
        )
        if exact_qae:
            lam_lo = true_sum
        else:
            lam_lo = max(sum_est - e_sum, cutoff)
            sum_est = max(sum_est, cutoff)

        amp = fixed_point_amplify(
            true_sum, params.amplification_delta, cost_constant=params.cost_constant, lambda_lower=lam_lo
        )
        sk_degree = int(truth.sk_degrees[k - 1])
        unit_cost = amp.L * cost_uk + sk_degree
        e_v = params.vprime_error(k, sum_est)
        M_v = qae_grid_size(e_v, params.vprime_bound(k))
        vprime_est = _amplitude_estimate(
            truth.vprimes[k - 1], M_v, rounds, seeds[3 * (k - 1) + 2], ledger, unit_cost, f"v'_{k}", exact_qae
        )

        v_k[k - 1] = (k + 1) * vprime_est * sum_est
        sum_k[k - 1] = sum_est
        # lam_lo can overshoot the true Sum(k), voiding the guaranteed fidelity
        fidelity_sq = min(amp.fidelity_sq, amp.guaranteed_fidelity_sq)
        budget = 8 * (k + 1) * (
            params.vprime_bound(k) * e_sum + sum_est * e_v + sum_est * math.sqrt(1.0 - fidelity_sq)
        )
        error_bar += budget
        record.sum_est = sum_est
        record.M_sum = M_sum
        record.vprime_true = float(truth.vprimes[k - 1])
        record.vprime_est = vprime_est
        record.M_vprime = M_v
        record.amp_rounds = amp.L
        record.fidelity_deficit = amp.deficit
        record.v_k = float(v_k[k - 1])
        record.error_budget = budget
        record.queries = ledger.total - before

    v = float(-2.0 + 8.0 * np.sum(v_k))
    entropy = shannon_entropy(o.dist)
    logger.info(" Estimate %.6f (exact %.6f) with %d queries", v, entropy, ledger.total)
    return EstimateReport(
        v_k=v_k,
        sum_k=sum_k,
        v=v,
        exact_entropy=entropy,
        abs_error=abs(v - entropy),
        ledger=ledger,
        params=params,
        seed=seed,
        levels=records,
        method="main",
        error_bar=error_bar,
    )


def folklore_estimate(o, eps, seed=None, boost_rounds=7, exact_qae=False):
    """
    Single-polynomial baseline: one approximation of sqrt(log(1/x) / (4 log(1/beta))) on
    [beta, 1 - beta] with beta = sqrt(eps / (2n)), followed by amplitude estimation of
    sum_i p_i S(sqrt p_i)^2. Probabilities below eps / (2n) are not resolved.
    """
    params = choose_params(o.n, eps, boost_rounds=boost_rounds, cost_constant=o.cost_constant)
    beta = math.sqrt(eps / (2.0 * o.n))
    log_term = math.log2(1.0 / beta)
    eta = eps / (32.0 * log_term)
    poly = approx_sqrt_log(beta, eta)

    # simulation-side truth on a scratch ledger
    flagged = apply_svt(o.fork(), poly)
    true_amp = power_sum(flagged)

    target = eps / (16.0 * log_term)
    a_bound = min(1.0, (0.5 + eta) ** 2 + eps / 2.0)
    M = qae_grid_size(target, a_bound)
    rng_seed = np.random.SeedSequence(seed).spawn(1)[0]
    estimate = _amplitude_estimate(
        true_amp, M, params.boost_rounds, rng_seed, o.ledger, poly.degree, "S~ power sum", exact_qae
    )
    v = 8.0 * log_term * estimate
    entropy = shannon_entropy(o.dist)
    return EstimateReport(
        v_k=np.zeros(0),
        sum_k=np.zeros(0),
        v=v,
        exact_entropy=entropy,
        abs_error=abs(v - entropy),
        ledger=o.ledger,
        params=params,
        seed=seed,
        method="folklore",
        error_bar=8.0 * log_term * (target + eta),
    )


class EntropyEstimationModel:
    def __init__(self, args=None, **kwargs):
        """
        Initializes an EntropyEstimationModel.

        Args:
            args (optional): Default args will be used if this parameter is not provided. If provided, it should be a dict containing the args that should be changed in the default args, or a SimulationArgs instance.
            **kwargs (optional): `sweep_config` for a wandb sweep; its values override args.
        """  # noqa: ignore flake8"

        self.args = self._load_model_args()

        if isinstance(args, dict):
            self.args.update_from_dict(args)
        elif isinstance(args, SimulationArgs):
            self.args = args

        if "sweep_config" in kwargs:
            self.is_sweeping = True
            sweep_config = kwargs.pop("sweep_config")
            sweep_values = sweep_config_to_sweep_values(sweep_config)
            self.args.update_from_dict(sweep_values)
        else:
            self.is_sweeping = False

        if self.args.manual_seed:
            random.seed(self.args.manual_seed)
            np.random.seed(self.args.manual_seed)

        if self.args.wandb_project and not wandb_available:
            warnings.warn("wandb_project specified but wandb is not available. Wandb disabled.")
            self.args.wandb_project = None

        self.results = {}
        self.baseline = None

    def oracle(self, dist):
        if not isinstance(dist, Distribution):
            dist = Distribution(dist)
        return OracleModel(dist, cost_constant=self.args.cost_constant)

    def params(self, n, eps):
        return choose_params(n, eps, boost_rounds=self.args.boost_rounds, cost_constant=self.args.cost_constant)

    def estimate(self, dist, eps, seed=None):
        """
        Runs one estimate on a fresh oracle.

        Args:
            dist: Distribution (or probability vector) to estimate.
            eps: Target additive error.
            seed (optional): Defaults to args.manual_seed.

        Returns:
            report: EstimateReport of the main estimator. When args.folklore is set the baseline runs on its own oracle and its report is kept in self.baseline.
        """  # noqa: ignore flake8"
        if seed is None:
            seed = self.args.manual_seed
        report = estimate_entropy(
            self.oracle(dist), eps, seed, boost_rounds=self.args.boost_rounds, exact_qae=self.args.exact_qae
        )
        self.results = {
            "estimate": report.v,
            "exact_entropy": report.exact_entropy,
            "abs_error": report.abs_error,
            "queries": report.queries_total,
        }
        self.baseline = None
        if self.args.folklore:
            self.baseline = folklore_estimate(
                self.oracle(dist), eps, seed, boost_rounds=self.args.boost_rounds, exact_qae=self.args.exact_qae
            )
            self.results.update(
                {
                    "estimate_folklore": self.baseline.v,
                    "abs_error_folklore": self.baseline.abs_error,
                    "queries_folklore": self.baseline.queries_total,
                }
            )
        if self.args.wandb_project:
            wandb.init(
                project=self.args.wandb_project,
                config=self.args.get_args_for_saving(),
                **self.args.wandb_kwargs,
            )
            wandb.log(self.results)
            wandb.finish()
        return report

    def exact(self, dist, eps):
        """Noiseless value of the estimator's target quantity, and the envelope around H."""
        if not isinstance(dist, Distribution):
            dist = Distribution(dist)
        params = self.params(dist.n, eps)
        return exact_v(dist, params), error_envelope(params, self.args.envelope_constant)

    def save_args(self, output_dir=None):
        self.args.save(output_dir or self.args.output_dir)

    def _load_model_args(self, input_dir=None):
        args = SimulationArgs()
        args.load(input_dir)
        return args
