import io

import numpy as np
import pandas as pd
import pytest

from qentropy.distributions import make_distribution
from qentropy.estimator import choose_params
from qentropy.oracle_svt import OracleModel
from qentropy.polyapprox import make_step_poly
from qentropy.separation import (
    CascadeConfig,
    beta_coefficients,
    branch_mass,
    build_cascade,
    cascade_state,
    cascade_table,
    check_concentration,
    concentration_report,
    cost_envelope,
    export_branch_masses_csv,
    export_table_csv,
    level_of,
    misplaced_mass,
    query_cost_Uk,
    simulate_branches,
    threshold,
    threshold_report,
)


def test_thresholds():
    cfg = build_cascade(4, 0.1)
    assert cfg.thresholds == (0.5, 0.25, 0.125, 0.0625)
    assert threshold(3) == 0.125
    with pytest.raises(ValueError):
        cfg.step_poly(5)


def test_config_rejects_mismatched_polynomials():
    polys = [make_step_poly(threshold(j), 0.1) for j in (1, 2)]
    with pytest.raises(ValueError):
        CascadeConfig(m=2, eps=0.05, step_polys=polys)
    with pytest.raises(ValueError):
        CascadeConfig(m=3, eps=0.1, step_polys=polys)


@pytest.mark.parametrize("x, expected", [(1.0, 1), (0.5, 1), (0.49, 2), (0.25, 2), (0.2, 3), (0.0625, 4)])
def test_level_of(x, expected):
    assert level_of(x) == expected


def test_beta_coefficients_are_a_rotation():
    cfg = build_cascade(4, 0.1)
    for x in (0.0, 0.1, 0.3, 0.7, 1.0):
        beta, beta_prime = beta_coefficients(cfg, x, 2)
        assert beta ** 2 + beta_prime ** 2 == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        beta_coefficients(cfg, 1.5, 1)


@pytest.mark.parametrize("eps, m", [(0.1, 6), (0.05, 5)])
def test_threshold_clauses(eps, m):
    cfg = build_cascade(m, eps)
    report = threshold_report(cfg, np.linspace(0.0, 1.0, 1000))
    assert (report["max_beta_below"] <= eps).all()
    assert (report["max_beta_prime_above"] <= eps).all()


def test_table_is_normalized():
    cfg = build_cascade(6, 0.1)
    table = cascade_table(cfg, np.linspace(0.0, 1.0, 257))
    total = np.sum(table.B ** 2, axis=0) + table.B_prime[-1] ** 2
    np.testing.assert_allclose(total, 1.0, atol=1e-12)


@pytest.mark.parametrize("eps, m", [(0.1, 6), (0.05, 6)])
def test_concentration(eps, m):
    cfg = build_cascade(m, eps)
    xs = np.linspace(threshold(m), 1.0, 1000)
    table = cascade_table(cfg, xs)
    for x in xs:
        j_star, mass, ok = check_concentration(table, x, eps)
        assert ok, (x, j_star, mass)
        assert misplaced_mass(table, x) <= 4 * j_star * eps ** 2


def _deep_grid(m):
    return np.union1d(np.linspace(0.0, 1.0, 1000), np.geomspace(threshold(m) / 4, 1.0, 1000))


@pytest.mark.slow
@pytest.mark.parametrize("m", [8, 10, 12])
def test_threshold_clauses_deep(m):
    cfg = build_cascade(m, 0.1)
    report = threshold_report(cfg, _deep_grid(m))
    assert (report["max_beta_below"] <= 0.1).all()
    assert (report["max_beta_prime_above"] <= 0.1).all()


@pytest.mark.slow
@pytest.mark.parametrize("m", [8, 10, 12])
def test_concentration_deep(m):
    cfg = build_cascade(m, 0.1)
    xs = _deep_grid(m)
    xs = xs[xs >= threshold(m)]
    table = cascade_table(cfg, xs)
    for x in xs:
        j_star, mass, ok = check_concentration(table, x, 0.1)
        assert ok, (x, j_star, mass)
        assert misplaced_mass(table, x) <= 4 * j_star * 0.01


def test_concentration_report():
    cfg = build_cascade(5, 0.1)
    report = concentration_report(cfg, np.linspace(0.0, 1.0, 200))
    assert report["ok"].all()
    assert (report["x"] >= threshold(5)).all()


def test_concentration_rejects_small_x():
    cfg = build_cascade(3, 0.1)
    table = cascade_table(cfg, [0.01, 0.5])
    with pytest.raises(ValueError):
        check_concentration(table, 0.01, 0.1)


@pytest.mark.parametrize("k", [1, 4, 8])
def test_closed_form_matches_recurrence(k):
    cfg = build_cascade(8, 0.1)
    xs = np.linspace(0.0, 1.0, 101)
    table = cascade_table(cfg, xs)
    for col, x in enumerate(xs):
        branches, remainder = simulate_branches(cfg, x, k)
        for j in range(1, k + 1):
            assert abs(branches[j] - table.B[j - 1, col]) <= 1e-12
        assert abs(remainder - table.B_prime[k - 1, col]) <= 1e-12


def test_cascade_state_charges_and_normalizes():
    d = make_distribution("uniform", 8)
    o = OracleModel(d)
    cfg = build_cascade(5, 0.1)
    state = cascade_state(o, cfg, 4)
    assert state.total_norm_sq == pytest.approx(1.0, abs=1e-12)
    assert o.query_count == query_cost_Uk(cfg, 4)
    # sqrt(1/8) lies in [1/4, 1/2): levels 2 and 3 hold the mass
    assert branch_mass(state, 2) + branch_mass(state, 3) >= 1 - 4 * 2 * 0.1 ** 2


def test_query_cost_within_envelope():
    cfg = build_cascade(6, 0.1)
    costs = [query_cost_Uk(cfg, k) for k in range(1, 7)]
    assert costs == sorted(costs)
    for k, cost in enumerate(costs, start=1):
        assert cost <= cost_envelope(cfg, k)


@pytest.mark.parametrize("family, eps", [("uniform", 0.5), ("uniform", 0.25), ("zipf", 0.5), ("dyadic", 0.25)])
def test_sum_bound(family, eps):
    d = make_distribution(family, 8)
    params = choose_params(8, eps)
    cfg = build_cascade(params.m, params.delta)
    state = cascade_state(OracleModel(d), cfg, params.m)
    for k in range(1, params.m + 1):
        bound = 4 * d.n / 4 ** k + 16 * params.m * params.delta ** 2
        assert branch_mass(state, k) <= bound


def test_export_csv(tmp_path):
    cfg = build_cascade(3, 0.1)
    table = cascade_table(cfg, [0.1, 0.4, 0.9])
    path = tmp_path / "table.csv"
    export_table_csv(table, str(path))
    frame = pd.read_csv(str(path))
    assert list(frame.columns) == ["level", "i", "beta", "beta_prime", "B", "B_prime"]
    assert len(frame) == 9

    state = cascade_state(OracleModel(make_distribution("dyadic", 4)), cfg, 3)
    masses = pd.read_csv(io.StringIO(export_branch_masses_csv(state)))
    assert list(masses["level"].astype(str)) == ["1", "2", "3", "residual"]
    assert masses["mass"].sum() == pytest.approx(1.0, abs=1e-12)
