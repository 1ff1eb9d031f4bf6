import logging
import os
import warnings
from multiprocessing import Pool

import pandas as pd
from tqdm.auto import tqdm

from qentropy.distributions import make_distribution
from qentropy.estimator import estimate_entropy, folklore_estimate
from qentropy.oracle_svt import OracleModel

try:
    import wandb

    wandb_available = True
except ImportError:
    wandb_available = False

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "family",
    "n",
    "eps",
    "seed",
    "estimate",
    "exact",
    "abs_err",
    "success",
    "queries_total",
    "queries_folklore",
    "m",
    "skipped_levels",
]


def run_cell(task):
    """One (family, n, eps, seed) estimate; returns a row dict in SWEEP_COLUMNS order."""
    family, n, eps, seed, cost_constant, boost_rounds, exact_qae, folklore = task
    dist = make_distribution(family, n)
    o = OracleModel(dist, cost_constant=cost_constant)
    report = estimate_entropy(o, eps, seed, boost_rounds=boost_rounds, exact_qae=exact_qae)
    queries_folklore = None
    if folklore:
        baseline = folklore_estimate(o.fork(), eps, seed, boost_rounds=boost_rounds, exact_qae=exact_qae)
        queries_folklore = baseline.queries_total
    return {
        "family": family,
        "n": n,
        "eps": eps,
        "seed": seed,
        "estimate": report.v,
        "exact": report.exact_entropy,
        "abs_err": report.abs_error,
        "success": int(report.abs_error <= eps),
        "queries_total": report.queries_total,
        "queries_folklore": queries_folklore,
        "m": report.params.m,
        "skipped_levels": ";".join(str(k) for k in report.skipped_levels),
    }


def sweep_tasks(cfg):
    return [
        (
            family,
            int(n),
            float(eps),
            cfg.seed0 + trial,
            cfg.cost_constant,
            cfg.boost_rounds,
            cfg.exact_qae,
            cfg.folklore,
        )
        for family in cfg.families
        for n in cfg.n_values
        for eps in cfg.eps_values
        for trial in range(cfg.trials)
    ]


def run_sweep(cfg):
    """
    Runs every (family, n, eps, trial) cell of a SweepConfig.

    Trial t uses seed seed0 + t. Rows are sorted by (family, n, eps, seed) regardless of
    scheduling and written to `cfg.output_path` when it is set.

    Returns:
        pandas DataFrame with SWEEP_COLUMNS.
    """
    cfg.validate()
    tasks = sweep_tasks(cfg)
    logger.info(" Running %d sweep cells", len(tasks))

    if cfg.use_multiprocessing and cfg.process_count > 1 and len(tasks) > 1:
        with Pool(cfg.process_count) as p:
            rows = list(tqdm(p.imap(run_cell, tasks), total=len(tasks), disable=cfg.silent))
    else:
        rows = [run_cell(task) for task in tqdm(tasks, disable=cfg.silent)]

    frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    frame = frame.sort_values(["family", "n", "eps", "seed"], kind="mergesort").reset_index(drop=True)

    if cfg.wandb_project:
        if wandb_available:
            wandb.init(project=cfg.wandb_project, config=cfg.get_args_for_saving(), **cfg.wandb_kwargs)
            for row in frame.to_dict(orient="records"):
                wandb.log(row)
            wandb.finish()
        else:
            warnings.warn("wandb_project specified but wandb is not available. Wandb disabled.")

    if cfg.output_path:
        write_rows(frame, cfg.output_path)
    return frame


def write_rows(frame, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(" Wrote %d rows to %s", len(frame), path)


def read_rows(path):
    return pd.read_csv(path, dtype={"skipped_levels": str}, keep_default_na=False, na_values=[""])


def success_rate(frame):
    """Fraction of successful trials per (family, n, eps)."""
    return frame.groupby(["family", "n", "eps"])["success"].mean().reset_index()

