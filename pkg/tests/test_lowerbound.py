from fractions import Fraction

import numpy as np
import pytest

from qentropy.distributions import shannon_entropy
from qentropy.lowerbound import (
    build_hard_instance,
    discrete_oracle_view,
    entropy_relation_check,
    instance_frame,
    outcome_counts,
    random_relation_sweep,
    read_bit_matrix,
    recover_entropy,
    reduction_estimate,
    sample_q,
)
from qentropy.oracle_svt import OracleModel

WORKED_BITS = [[1, 1, 0, 0, 0, 0, 0, 0]] * 4


@pytest.fixture
def worked():
    return build_hard_instance(bits=WORKED_BITS)


def test_worked_instance(worked):
    assert worked.n == 4 and worked.k == 8
    assert worked.f == (2, 2, 2, 2)
    assert worked.R == 8
    assert worked.t == Fraction(2)
    assert worked.q_exact == (Fraction(1, 16),) * 4 + (Fraction(3, 4),)
    assert shannon_entropy(worked.p) == pytest.approx(2.0, abs=1e-12)
    assert shannon_entropy(worked.q) == pytest.approx(1.311278124459133, abs=1e-12)

    lhs, rhs, dev = entropy_relation_check(worked)
    assert rhs == pytest.approx(2.0, abs=1e-12)
    assert dev <= 1e-12


def test_worked_instance_table(worked):
    table = discrete_oracle_view(worked)
    assert len(table) == 32
    counts = outcome_counts(table, worked.n + 1)
    assert counts.tolist() == [2, 2, 2, 2, 24]

    o = OracleModel.from_discrete_table(table, worked.n + 1)
    assert o.dist.probs == pytest.approx(worked.q.probs, abs=1e-15)


def test_instance_frame(worked):
    frame = instance_frame(worked)
    assert len(frame) == worked.n + 1
    assert frame["f"].tolist() == [2, 2, 2, 2, 24]
    assert frame["q"].sum() == pytest.approx(1.0)


def test_bits_are_read_only(worked):
    with pytest.raises(ValueError):
        worked.x[0, 0] = 0


def test_single_bit_instance():
    inst = build_hard_instance(bits=[[1]])
    assert inst.p.probs == (1.0,)
    assert inst.q.probs == (1.0, 0.0)
    with pytest.raises(ValueError):
        entropy_relation_check(inst)


@pytest.mark.parametrize(
    "bits",
    [
        [[0, 0], [0, 0]],
        [[0, 2]],
        [[]],
    ],
)
def test_invalid_bit_matrices(bits):
    with pytest.raises(ValueError):
        build_hard_instance(bits=bits)


def test_random_instance():
    inst = build_hard_instance(n=16, k=32, seed=5)
    assert inst.x.shape == (16, 32)
    assert sum(inst.f) == inst.R
    assert inst.t == Fraction(inst.R, 16)
    assert sum(inst.q_exact) == 1
    assert inst.q.n == 17
    _, _, dev = entropy_relation_check(inst)
    assert dev <= 1e-10


def test_fixed_total():
    inst = build_hard_instance(n=16, k=32, t=4, seed=1)
    assert inst.R == 64
    assert inst.ratio == Fraction(1, 8)


@pytest.mark.parametrize("t", [0, 40, 0.3])
def test_fixed_total_errors(t):
    with pytest.raises(ValueError):
        build_hard_instance(n=16, k=32, t=t, seed=1)


def test_missing_shape():
    with pytest.raises(ValueError):
        build_hard_instance(n=4)


def test_sample_q_is_seeded(worked):
    assert sample_q(worked, 3) == sample_q(worked, 3)
    draws = sample_q(worked, 3, size=10)
    assert np.array_equal(draws, sample_q(worked, 3, size=10))
    assert set(draws.tolist()) <= {1, 2, 3, 4, 5}


def test_sample_q_full_row():
    inst = build_hard_instance(bits=[[1, 1, 1]])
    assert set(sample_q(inst, 0, size=100).tolist()) == {1}


def test_sample_q_frequencies(worked):
    size = 100_000
    draws = sample_q(worked, 11, size=size)
    freqs = np.bincount(draws - 1, minlength=worked.n + 1) / size
    for observed, expected in zip(freqs, worked.q.probs):
        sigma = np.sqrt(expected * (1 - expected) / size)
        assert abs(observed - expected) <= 4 * sigma


def test_recover_entropy_inverts_relation(worked):
    assert recover_entropy(shannon_entropy(worked.q), worked) == pytest.approx(2.0, abs=1e-12)


def test_random_relation_sweep():
    frame = random_relation_sweep(instances=100, seed=0)
    assert len(frame) == 100
    assert frame["max_dev"].max() <= 1e-10
    assert ((frame["R"] > 0) & (frame["R"] < frame["n"] * frame["k"])).all()


def test_read_bit_matrix(tmp_path):
    path = tmp_path / "bits.txt"
    path.write_text("# worked instance\n11000000\n11000000\n\n11000000\n11000000\n")
    inst = read_bit_matrix(str(path))
    assert inst.f == (2, 2, 2, 2)


@pytest.mark.parametrize("content", ["1100\n110\n", "1120\n", "# nothing\n"])
def test_read_bit_matrix_errors(tmp_path, content):
    path = tmp_path / "bits.txt"
    path.write_text(content)
    with pytest.raises(ValueError):
        read_bit_matrix(str(path))


def test_reduction_estimate(worked):
    result = reduction_estimate(worked, 1.0, seed=0, exact_qae=True)
    assert result.eps == pytest.approx(0.25)
    assert result.h_p == pytest.approx(2.0)
    assert result.abs_error <= 1.0
    assert result.report.params.n == worked.n + 1
