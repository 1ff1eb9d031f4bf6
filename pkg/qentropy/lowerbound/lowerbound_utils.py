import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pandas as pd

from qentropy.distributions import Distribution, binary_entropy, shannon_entropy
from qentropy.estimator import estimate_entropy
from qentropy.oracle_svt import OracleModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HardInstance:
    """
    n bit strings x^(i) of length k with Hamming weights f_i and total R = t n.

    p_i = f_i / R over n outcomes; q_i = f_i / (n k) plus q_{n+1} = 1 - t / k over n + 1
    outcomes. `t` and `q_exact` are exact rationals.
    """

    x: np.ndarray
    f: tuple
    R: int
    t: Fraction
    p: Distribution
    q: Distribution
    q_exact: tuple

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def k(self):
        return self.x.shape[1]

    @property
    def ratio(self):
        """t / k, the mass q puts on the first n outcomes."""
        return self.t / self.k


def _random_bits(n, k, t, seed):
    rng = np.random.default_rng(seed)
    if t is None:
        return rng.integers(0, 2, size=(n, k))
    R = Fraction(t).limit_denominator() * n
    if R.denominator != 1:
        raise ValueError(f"t={t} gives a non-integral total R = t n = {R}.")
    R = int(R)
    if not 0 < R <= n * k:
        raise ValueError(f"t={t} needs R = {R} ones, outside 1..{n * k}.")
    bits = np.zeros(n * k, dtype=int)
    bits[rng.choice(n * k, size=R, replace=False)] = 1
    return bits.reshape(n, k)


def build_hard_instance(bits=None, n=None, k=None, t=None, seed=None):
    """
    Builds a hard instance from an explicit 0/1 matrix (rows x^(i)) or, when `bits` is None,
    from random bits of shape (n, k). With `t` given, exactly t n ones are placed uniformly.
    """
    if bits is None:
        if n is None or k is None:
            raise ValueError("Either bits or both n and k are required.")
        if int(n) != n or n < 1 or int(k) != k or k < 1:
            raise ValueError(f"n and k must be positive integers, got n={n}, k={k}.")
        bits = _random_bits(int(n), int(k), t, seed)
    x = np.array(bits, dtype=np.int8, ndmin=2)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError(f"Bit matrix must be two-dimensional with k >= 1, got shape {x.shape}.")
    if not np.isin(x, (0, 1)).all():
        raise ValueError("Bit matrix entries must be 0 or 1.")
    x.setflags(write=False)

    n, k = x.shape
    f = tuple(int(w) for w in x.sum(axis=1))
    R = sum(f)
    if R == 0:
        raise ValueError("All-zero bit matrix: R = 0 defines no distribution p.")
    total = n * k
    q_exact = tuple(Fraction(w, total) for w in f) + (1 - Fraction(R, total),)
    return HardInstance(
        x=x,
        f=f,
        R=R,
        t=Fraction(R, n),
        p=Distribution([w / R for w in f]),
        q=Distribution([float(v) for v in q_exact]),
        q_exact=q_exact,
    )


def sample_q(inst, seed, size=None):
    """
    Draws from q by picking a uniform row i and a uniform column j, returning i (1-based)
    when x^(i)_j = 1 and n + 1 otherwise.
    """
    rng = np.random.default_rng(seed)
    i = rng.integers(0, inst.n, size=size)
    j = rng.integers(0, inst.k, size=size)
    outcome = np.where(inst.x[i, j] == 1, i + 1, inst.n + 1)
    if size is None:
        return int(outcome)
    return outcome


def recover_entropy(h_q, inst):
    """H(p) = (k / t) (H(q) - B(t / k))."""
    ratio = inst.ratio
    if not 0 < ratio < 1:
        raise ValueError(f"t/k = {ratio} must lie strictly inside (0, 1).")
    return float(1 / ratio) * (h_q - binary_entropy(float(ratio)))


def entropy_relation_check(inst):
    lhs = shannon_entropy(inst.p)
    rhs = recover_entropy(shannon_entropy(inst.q), inst)
    return lhs, rhs, abs(lhs - rhs)


def discrete_oracle_view(inst):
    """
    Table over S = [n] x [k] in row-major order: s = (i, j) maps to i + 1 when x^(i)_j = 1
    and to n + 1 otherwise.
    """
    rows = np.arange(1, inst.n + 1)[:, None]
    return np.where(inst.x == 1, rows, inst.n + 1).ravel()


def outcome_counts(table, n_outcomes):
    return np.bincount(np.asarray(table) - 1, minlength=n_outcomes)


@dataclass
class ReductionResult:
    h_p: float
    h_p_estimate: float
    h_q_estimate: float
    eps: float
    report: object

    @property
    def abs_error(self):
        return abs(self.h_p_estimate - self.h_p)


def reduction_estimate(inst, error, seed=None, boost_rounds=7, exact_qae=False, cost_constant=1.0):
    """
    Estimates H(p) by running the entropy estimator on q through the discrete-query view
    with eps = error t / k, so the recovered H(p) carries error `error`.
    """
    eps = min(1.0, error * float(inst.ratio))
    o = OracleModel.from_discrete_table(discrete_oracle_view(inst), inst.n + 1, cost_constant=cost_constant)
    report = estimate_entropy(o, eps, seed, boost_rounds=boost_rounds, exact_qae=exact_qae)
    h_p = shannon_entropy(inst.p)
    recovered = recover_entropy(report.v, inst)
    logger.info(" Reduction estimate %.6f for H(p) = %.6f (eps on q = %.4g)", recovered, h_p, eps)
    return ReductionResult(h_p=h_p, h_p_estimate=recovered, h_q_estimate=report.v, eps=eps, report=report)


def instance_frame(inst):
    """One row per outcome of q: outcome, weight f, p, q."""
    rows = [
        {"outcome": i + 1, "f": w, "p": inst.p.probs[i], "q": inst.q.probs[i]} for i, w in enumerate(inst.f)
    ]
    rows.append({"outcome": inst.n + 1, "f": inst.n * inst.k - inst.R, "p": 0.0, "q": inst.q.probs[-1]})
    return pd.DataFrame(rows)


def read_bit_matrix(path):
    """n lines of k characters in {0, 1}; blank lines and '#' comments are ignored."""
    rows = []
    with open(path, "r") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if set(line) - {"0", "1"}:
                raise ValueError(f"{path}:{line_number}: expected only 0/1 characters, got '{line}'.")
            if rows and len(line) != len(rows[0]):
                raise ValueError(f"{path}:{line_number}: row has {len(line)} bits, expected {len(rows[0])}.")
            rows.append([int(c) for c in line])
    if not rows:
        raise ValueError(f"{path} contains no bit rows.")
    return build_hard_instance(bits=rows)


def random_relation_sweep(instances=100, max_n=64, max_k=64, seed=0):
    """entropy_relation_check over random instances; returns the deviations as a DataFrame."""
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < instances:
        n = int(rng.integers(1, max_n + 1))
        k = int(rng.integers(1, max_k + 1))
        bits = rng.integers(0, 2, size=(n, k))
        R = int(bits.sum())
        # t/k must stay inside (0, 1)
        if R == 0 or R == n * k:
            continue
        lhs, rhs, dev = entropy_relation_check(build_hard_instance(bits=bits))
        rows.append({"n": n, "k": k, "R": R, "lhs": lhs, "rhs": rhs, "max_dev": dev})
    return pd.DataFrame(rows)

