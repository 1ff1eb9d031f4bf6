import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import ortho_group

from qentropy.distributions import Distribution

logger = logging.getLogger(__name__)

# Cost formulas a ledger entry may cite.
FORMULAS = {
    "fixed_point_rounds": "amplification rounds L = ceil(c log2(2/delta) / sqrt(lambda)), times the round cost",
    "qae_grid": "amplitude estimation grid size M, times the cost of one call",
    "svt_degree": "one oracle use per degree of the transformed polynomial",
    "step_degree": "degree of one threshold polynomial",
    "cascade_cost": "sum of threshold polynomial degrees over the separated levels",
}

MAX_BLOCK_SUPPORT = 12


@dataclass(frozen=True)
class LedgerEntry:
    subroutine: str
    formula: str
    count: int
    cost_constant: float = 1.0


class QueryLedger:
    """Per-subroutine oracle-use counts; every entry cites the formula it was computed from."""

    def __init__(self, entries=None):
        self.entries = []
        for entry in entries or []:
            self.charge(entry.subroutine, entry.formula, entry.count, entry.cost_constant)

    @property
    def total(self):
        return sum(entry.count for entry in self.entries)

    def charge(self, label, formula, count, cost_constant=1.0):
        if formula not in FORMULAS:
            raise ValueError(f"Unknown cost formula '{formula}'. Choose from {', '.join(FORMULAS)}.")
        if isinstance(count, (float, np.floating)):
            if not float(count).is_integer():
                raise ValueError(f"Query counts are integers, got {count}.")
        count = int(count)
        if count < 0:
            raise ValueError(f"Query counts must be nonnegative, got {count} for '{label}'.")
        self.entries.append(LedgerEntry(str(label), formula, count, float(cost_constant)))
        return self

    def merge(self, other):
        """A new ledger holding both sets of entries; totals add."""
        return QueryLedger(self.entries + other.entries)

    def by_formula(self):
        totals = {}
        for entry in self.entries:
            totals[entry.formula] = totals.get(entry.formula, 0) + entry.count
        return totals

    def to_frame(self):
        rows = [(entry.subroutine, entry.formula, entry.count) for entry in self.entries]
        rows.append(("TOTAL", "", self.total))
        return pd.DataFrame(rows, columns=["subroutine", "formula", "count"])

    def to_csv(self, path=None):
        return self.to_frame().to_csv(path, index=False)

    def __len__(self):
        return len(self.entries)


def charge(ledger, label, formula, count, cost_constant=1.0):
    return ledger.charge(label, formula, count, cost_constant)


class OracleModel:
    """
    Semantic model of a quantum probability oracle for a distribution.

    Only squared amplitudes and query counts are tracked. Each use of the oracle or its
    inverse (controlled or not) is one query, charged to `ledger`.
    """

    def __init__(self, dist, ledger=None, cost_constant=1.0):
        if not isinstance(dist, Distribution):
            dist = Distribution(dist)
        self.dist = dist
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.cost_constant = cost_constant

    @property
    def query_count(self):
        return self.ledger.total

    @property
    def n(self):
        return self.dist.n

    def singular_values(self):
        return self.dist.support_sqrt()

    def charge(self, label, formula, count):
        self.ledger.charge(label, formula, count, self.cost_constant)
        return self

    def fork(self):
        """Same distribution, fresh ledger."""
        return OracleModel(self.dist, cost_constant=self.cost_constant)

    @classmethod
    def from_discrete_table(cls, table, n_outcomes, **kwargs):
        """
        Probability oracle obtained by querying a discrete table s -> f(s) (outcomes 1-based)
        on a uniform superposition over its domain.
        """
        table = np.asarray(table)
        if table.size == 0:
            raise ValueError("Discrete query table is empty.")
        if table.min() < 1 or table.max() > n_outcomes:
            raise ValueError(f"Table values must lie in 1..{n_outcomes}.")
        counts = np.bincount(table - 1, minlength=n_outcomes)
        return cls(Distribution(counts / table.size), **kwargs)

    def state_matrix(self, seed=0):
        """
        Unitary on registers A (outcome) and B (|psi_i>) whose first column is
        sum_i sqrt(p_i) |i>|psi_i>, with |psi_i> a seeded orthonormal family.
        """
        n = self.n
        psi = ortho_group.rvs(n, random_state=seed) if n > 1 else np.ones((1, 1))
        prepared = np.zeros(n * n)
        for i, amplitude in enumerate(self.singular_values()):
            prepared += amplitude * np.kron(np.eye(n)[i], psi[:, i])
        rng = np.random.default_rng(seed)
        basis = np.column_stack([prepared, rng.standard_normal((n * n, n * n - 1))])
        q, r = np.linalg.qr(basis)
        return q * np.sign(r[0, 0])

    def block_matrix(self, seed=0):
        """
        A = Pi~ (O_p x I_C) Pi on registers A, B and a copy register C, with
        Pi = |0><0|_A x |0><0|_B x I_C and Pi~ = sum_i |i><i|_A x I_B x |i><i|_C.
        """
        n = self.n
        if n > MAX_BLOCK_SUPPORT:
            raise ValueError(f"Explicit block matrices are limited to n <= {MAX_BLOCK_SUPPORT}.")
        eye = np.eye(n)
        zero = np.outer(eye[0], eye[0])
        unitary = np.kron(self.state_matrix(seed), eye)
        pi_in = np.kron(np.kron(zero, zero), eye)
        pi_out = sum(np.kron(np.kron(np.outer(eye[i], eye[i]), eye), np.outer(eye[i], eye[i])) for i in range(n))
        return pi_out @ unitary @ pi_in

    def block_singular_values(self, seed=0):
        """Nonzero singular values of the explicit block, largest first."""
        values = np.linalg.svd(self.block_matrix(seed), compute_uv=False)
        return values[: self.n]
