import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from qentropy.amplitude import SUCCESS_PROBABILITY, coverage
from qentropy.lowerbound import build_hard_instance, entropy_relation_check, random_relation_sweep
from qentropy.polyapprox import (
    DEGREE_LAW_TOLERANCE,
    approx_sqrt_log,
    degree_law_exponent,
    import_poly,
    make_Sk,
    make_step_poly,
    recertify,
)
from qentropy.polyapprox.bounded_poly import first_failure
from qentropy.separation import (
    build_cascade,
    cascade_table,
    check_concentration,
    simulate_branches,
    threshold,
)

logger = logging.getLogger(__name__)

SUITES = ("polys", "cascade", "qae", "reduction")

BRANCH_TOLERANCE = 1e-12
QAE_MASS_TOLERANCE = 1e-9
RELATION_TOLERANCE = 1e-10
WORKED_TOLERANCE = 1e-12


@dataclass
class Check:
    suite: str
    name: str
    location: str
    value: float
    bound: float
    passed: bool


@dataclass
class CertifyReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def first_failure(self):
        for check in self.checks:
            if not check.passed:
                return check
        return None

    def add(self, name, location, value, bound, passed):
        self.checks.append(Check(self.suite, name, location, float(value), float(bound), bool(passed)))

    def to_frame(self):
        return pd.DataFrame([check.__dict__ for check in self.checks])

    def summary(self):
        failure = self.first_failure
        if failure is None:
            return f"{self.suite}: PASS ({len(self.checks)} checks)"
        return (
            f"{self.suite}: FAIL at {failure.name} [{failure.location}]: "
            f"value {failure.value:.6g}, bound {failure.bound:.6g}"
        )


def _poly_checks(report, label, poly):
    failure = first_failure(poly)
    report.add(f"{label} certificate", failure or "all entries", 0.0 if failure is None else 1.0, 0.0, failure is None)
    ok, entries = recertify(poly, offset=True)
    worst = max((entry.achieved / entry.bound for entry in entries), default=0.0)
    report.add(f"{label} offset grid", f"degree {poly.degree}", worst, 2.0, ok)


def _degree_law_check(report, label, polys, scales):
    exponent = degree_law_exponent(polys, scales)
    report.add(
        f"{label} degree law",
        f"exponent {exponent:.4g}, degrees {polys[0].degree}..{polys[-1].degree}",
        abs(exponent - 1.0),
        DEGREE_LAW_TOLERANCE,
        abs(exponent - 1.0) <= DEGREE_LAW_TOLERANCE,
    )


def certify_polys(eps=0.1, m=6, betas=(0.1, 0.05, 0.025), silent=False):
    """
    Certificates of the step polynomials, S_k and S~ on main and offset grids, and the growth
    of each family's degree with its scale (1/phi_j, 1/phi_{k+1}, 1/beta).
    """
    report = CertifyReport("polys")
    steps = []
    for j in tqdm(range(1, m + 1), desc="step", disable=silent):
        steps.append(make_step_poly(threshold(j), eps))
        _poly_checks(report, f"step j={j} eps={eps}", steps[-1])
    # the 1/phi regime starts at phi = 1/4; at phi = 1/2 the transition sits where the nodes cluster
    if m > 2:
        _degree_law_check(report, f"step eps={eps}", steps[1:], [1.0 / threshold(j) for j in range(2, m + 1)])

    levels = []
    for k in tqdm(range(1, m + 1), desc="S_k", disable=silent):
        levels.append(make_Sk(k, eps / 4))
        _poly_checks(report, f"S_k k={k} eta={eps / 4}", levels[-1])
    if m > 2:
        scales = [1.0 / threshold(k + 1) for k in range(2, m + 1)]
        _degree_law_check(report, f"S_k eta={eps / 4}", levels[1:], scales)

    sqrt_logs = [approx_sqrt_log(beta, eps / 2) for beta in betas]
    for beta, poly in zip(betas, sqrt_logs):
        _poly_checks(report, f"S~ beta={beta} eta={eps / 2}", poly)
    if len(betas) > 1:
        _degree_law_check(report, f"S~ eta={eps / 2}", sqrt_logs, [1.0 / beta for beta in betas])
    return report


def certify_poly_file(path):
    report = CertifyReport("polys")
    try:
        poly = import_poly(path)
    except ValueError as e:
        report.add("coefficient file", str(e), 1.0, 0.0, False)
        return report
    _poly_checks(report, f"{poly.kind} from {path}", poly)
    return report


def certify_cascade(eps_values=(0.1, 0.05), m=8, points=1000, concentration_constant=4.0, branch_levels=8):
    """
    Threshold clauses and concentration on a grid of `points` values in [phi_m, 1], and the
    closed-form B table against the level-by-level branch simulator.
    """
    report = CertifyReport("cascade")
    for eps in eps_values:
        cfg = build_cascade(m, eps)
        xs = np.linspace(threshold(m), 1.0, points)
        table = cascade_table(cfg, xs)
        for j in range(1, m + 1):
            below = table.x <= threshold(j)
            above = table.x >= 2 * threshold(j)
            worst_below = float(table.beta[j - 1, below].max()) if below.any() else 0.0
            worst_above = float(table.beta_prime[j - 1, above].max()) if above.any() else 0.0
            report.add("beta below phi_j", f"eps={eps} j={j}", worst_below, eps, worst_below <= eps)
            report.add("beta' above 2 phi_j", f"eps={eps} j={j}", worst_above, eps, worst_above <= eps)

        worst = None
        for x in xs:
            j_star, mass, ok = check_concentration(table, x, eps, concentration_constant)
            limit = 1.0 - concentration_constant * j_star * eps ** 2
            if worst is None or mass - limit < worst[1] - worst[2]:
                worst = (x, mass, limit, j_star)
            if not ok:
                break
        x, mass, limit, j_star = worst
        report.add("concentration", f"eps={eps} x={x:.6g} j*={j_star}", mass, limit, mass >= limit)

        k = min(branch_levels, m)
        deviation = 0.0
        for x in xs[:: max(1, points // 100)]:
            branches, remainder = simulate_branches(cfg, x, k)
            col = table.column(x)
            closed = np.array([table.B[j - 1, col] for j in range(1, k + 1)])
            deviation = max(
                deviation,
                float(np.max(np.abs(np.array([branches[j] for j in range(1, k + 1)]) - closed))),
                abs(remainder - table.B_prime[k - 1, col]),
            )
        report.add(
            "closed form vs recurrence",
            f"eps={eps} k<={k}",
            deviation,
            BRANCH_TOLERANCE,
            deviation <= BRANCH_TOLERANCE,
        )
    return report


def certify_qae(grid_points=50, M_values=(16, 64, 256)):
    """Mass of the exact QAE outcome distribution within the error bound, against 8/pi^2."""
    report = CertifyReport("qae")
    for M in M_values:
        masses = [(a, coverage(a, M)) for a in np.linspace(0.0, 1.0, grid_points)]
        a, worst = min(masses, key=lambda item: item[1])
        limit = SUCCESS_PROBABILITY - QAE_MASS_TOLERANCE
        report.add("coverage", f"M={M} a={a:.6g}", worst, limit, worst >= limit)
    return report


def certify_reduction(instances=100, seed=0):
    """Entropy relation on random hard instances and on the worked uniform-weight instance."""
    report = CertifyReport("reduction")
    sweep = random_relation_sweep(instances=instances, seed=seed)
    worst = sweep.loc[sweep["max_dev"].idxmax()]
    report.add(
        "relation sweep",
        f"n={int(worst['n'])} k={int(worst['k'])} R={int(worst['R'])}",
        worst["max_dev"],
        RELATION_TOLERANCE,
        worst["max_dev"] <= RELATION_TOLERANCE,
    )
    inst = build_hard_instance(bits=[[1, 1, 0, 0, 0, 0, 0, 0]] * 4)
    lhs, rhs, _ = entropy_relation_check(inst)
    deviation = max(abs(lhs - 2.0), abs(rhs - 2.0))
    report.add("worked instance", "n=4 k=8 f=(2,2,2,2)", deviation, WORKED_TOLERANCE, deviation <= WORKED_TOLERANCE)
    return report


def certify(what, poly_file=None, silent=True, **kwargs):
    """Runs one named suite (polys, cascade, qae, reduction) and returns its CertifyReport."""
    if what not in SUITES:
        raise ValueError(f"Unknown certification suite '{what}'. Choose from {', '.join(SUITES)}.")
    if what == "polys":
        report = certify_poly_file(poly_file) if poly_file else certify_polys(silent=silent, **kwargs)
    elif what == "cascade":
        report = certify_cascade(**kwargs)
    elif what == "qae":
        report = certify_qae(**kwargs)
    else:
        report = certify_reduction(**kwargs)
    logger.info(" %s", report.summary())
    return report
