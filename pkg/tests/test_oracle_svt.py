import numpy as np
import pytest

from qentropy.distributions import make_distribution
from qentropy.oracle_svt import FORMULAS, OracleModel, QueryLedger, apply_svt, charge, power_sum
from qentropy.polyapprox import BoundedPoly, UncertifiedPolynomialError, make_Sk


def test_ledger_charges_and_totals():
    ledger = QueryLedger()
    ledger.charge("U_1", "cascade_cost", 40)
    charge(ledger, "S_1", "svt_degree", 12)
    assert ledger.total == 52
    assert len(ledger) == 2
    assert ledger.by_formula() == {"cascade_cost": 40, "svt_degree": 12}


@pytest.mark.parametrize(
    "formula, count",
    [("made_up", 3), ("qae_grid", -1), ("qae_grid", 2.5)],
)
def test_ledger_rejects_bad_charges(formula, count):
    with pytest.raises(ValueError):
        QueryLedger().charge("x", formula, count)


def test_ledger_merge_is_order_independent():
    a = QueryLedger().charge("a", "qae_grid", 64)
    b = QueryLedger().charge("b", "svt_degree", 7).charge("c", "step_degree", 5)
    assert a.merge(b).total == b.merge(a).total == 76
    assert a.merge(b).by_formula() == b.merge(a).by_formula()


def test_ledger_frame(tmp_path):
    ledger = QueryLedger().charge("a", "qae_grid", 64).charge("b", "fixed_point_rounds", 9)
    frame = ledger.to_frame()
    assert list(frame.columns) == ["subroutine", "formula", "count"]
    assert frame.iloc[-1]["subroutine"] == "TOTAL"
    assert frame.iloc[-1]["count"] == 73
    assert set(frame["formula"][:-1]) <= set(FORMULAS)

    path = tmp_path / "ledger.csv"
    ledger.to_csv(str(path))
    assert path.read_text().splitlines()[0] == "subroutine,formula,count"


def test_singular_values_are_square_roots():
    d = make_distribution("dyadic", 4)
    o = OracleModel(d)
    np.testing.assert_allclose(o.singular_values(), np.sqrt(d.array))
    assert o.query_count == 0


@pytest.mark.parametrize("family, n", [("dyadic", 4), ("uniform", 3), ("two_point", 4)])
def test_block_singular_values(family, n):
    d = make_distribution(family, n)
    o = OracleModel(d)
    expected = np.sort(np.sqrt(d.array))[::-1]
    np.testing.assert_allclose(o.block_singular_values(seed=1), expected, atol=1e-10)


def test_state_matrix_is_unitary():
    o = OracleModel(make_distribution("zipf", 3))
    u = o.state_matrix(seed=2)
    np.testing.assert_allclose(u.T @ u, np.eye(9), atol=1e-12)


def test_block_matrix_size_limit():
    with pytest.raises(ValueError):
        OracleModel(make_distribution("uniform", 13)).block_matrix()


def test_from_discrete_table():
    o = OracleModel.from_discrete_table([1, 1, 2, 3], 3)
    assert o.dist.probs == (0.5, 0.25, 0.25)
    with pytest.raises(ValueError):
        OracleModel.from_discrete_table([0, 1], 2)
    with pytest.raises(ValueError):
        OracleModel.from_discrete_table([], 2)


def test_fork_keeps_distribution_with_fresh_ledger():
    o = OracleModel(make_distribution("uniform", 4), cost_constant=2.0)
    o.charge("x", "qae_grid", 10)
    forked = o.fork()
    assert forked.dist == o.dist
    assert forked.query_count == 0
    assert forked.cost_constant == 2.0


def test_apply_svt_identity():
    d = make_distribution("dyadic", 4)
    o = OracleModel(d)
    flagged = apply_svt(o, BoundedPoly.identity())
    np.testing.assert_allclose(flagged.flagged, d.array, atol=1e-15)
    assert power_sum(flagged) == pytest.approx(np.sum(d.array ** 2))
    assert flagged.residual_mass == pytest.approx(1 - np.sum(d.array ** 2))
    assert o.query_count == 1


def test_apply_svt_constant_keeps_state():
    o = OracleModel(make_distribution("zipf", 5))
    flagged = apply_svt(o, BoundedPoly.constant(1.0))
    assert power_sum(flagged) == pytest.approx(1.0)
    assert o.query_count == 0


def test_apply_svt_power_sum_matches_direct_sum():
    d = make_distribution("uniform", 8)
    o = OracleModel(d)
    poly = make_Sk(3, 0.05)
    expected = np.sum(d.array * poly(np.sqrt(d.array)) ** 2)
    assert power_sum(apply_svt(o, poly)) == pytest.approx(expected, abs=1e-14)
    assert o.query_count == poly.degree


def test_apply_svt_rejects_uncertified():
    o = OracleModel(make_distribution("uniform", 2))
    with pytest.raises(UncertifiedPolynomialError):
        apply_svt(o, BoundedPoly.from_chebyshev([0.0, 2.0]))


def test_apply_svt_rejects_unnormalized_input():
    o = OracleModel(make_distribution("uniform", 2))
    with pytest.raises(ValueError):
        apply_svt(o, BoundedPoly.identity(), amplitudes=[1.0, 1.0])
