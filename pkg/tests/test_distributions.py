import math

import numpy as np
import pytest

from qentropy.distributions import (
    Distribution,
    binary_entropy,
    make_distribution,
    read_distribution_file,
    shannon_entropy,
)


@pytest.mark.parametrize(
    "family, n, expected",
    [
        ("uniform", 8, 3.0),
        ("uniform", 1024, 10.0),
        ("point", 8, 0.0),
        ("dyadic", 4, 1.75),
        ("two_point", 2, -(0.64 * math.log2(0.64) + 0.36 * math.log2(0.36))),
    ],
)
def test_shannon_entropy(family, n, expected):
    assert shannon_entropy(make_distribution(family, n)) == pytest.approx(expected, abs=1e-12)


def test_uniform_entropy_is_log_support():
    for n in range(2, 1025):
        assert shannon_entropy(make_distribution("uniform", n)) == pytest.approx(math.log2(n), abs=1e-9)


@pytest.mark.parametrize("family", ["uniform", "point", "zipf", "two_point", "dyadic"])
@pytest.mark.parametrize("n", [2, 8, 64, 256, 1024])
def test_entropy_is_bounded_by_log_support(family, n):
    h = shannon_entropy(make_distribution(family, n))
    assert 0.0 <= h <= math.log2(n) + 1e-12


def test_zipf_four():
    probs = make_distribution("zipf", 4).array
    np.testing.assert_allclose(probs, [12 / 25, 6 / 25, 4 / 25, 3 / 25], atol=1e-15)


def test_zero_masses_contribute_nothing():
    d = make_distribution("two_point", 8)
    assert shannon_entropy(d) == pytest.approx(binary_entropy(0.36), abs=1e-12)


def test_zipf_is_decreasing():
    probs = make_distribution("zipf", 16).array
    assert np.all(np.diff(probs) < 0)
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("probs", [[0.5, 0.6], [1.1, -0.1], [0.5, 0.5 + 1e-9], [], [float("nan"), 1.0]])
def test_invalid_distributions(probs):
    with pytest.raises(ValueError):
        Distribution(probs)


def test_no_renormalization():
    d = Distribution([0.25, 0.75])
    assert d.probs == (0.25, 0.75)
    assert d.n == 2


def test_support_sqrt():
    d = make_distribution("dyadic", 4)
    np.testing.assert_allclose(d.support_sqrt() ** 2, d.array, atol=1e-15)


def test_permutation_invariance():
    d = make_distribution("zipf", 8)
    permuted = d.permuted([7, 3, 1, 0, 2, 6, 5, 4])
    assert shannon_entropy(permuted) == pytest.approx(shannon_entropy(d), abs=1e-12)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (1.0, 0.0), (0.5, 1.0), (0.25, 0.8112781244591328)])
def test_binary_entropy(x, expected):
    assert binary_entropy(x) == pytest.approx(expected, abs=1e-12)


def test_binary_entropy_is_symmetric():
    for x in np.linspace(0.0, 1.0, 10001):
        assert binary_entropy(x) == pytest.approx(binary_entropy(1.0 - x), abs=1e-12)
        assert 0.0 <= binary_entropy(x) <= 1.0


def test_binary_entropy_range():
    with pytest.raises(ValueError):
        binary_entropy(1.2)


def test_make_distribution_errors():
    with pytest.raises(ValueError):
        make_distribution("gaussian", 8)
    with pytest.raises(ValueError):
        make_distribution("uniform", 0)
    with pytest.raises(ValueError):
        make_distribution("point", 4, index=4)
    with pytest.raises(ValueError):
        make_distribution("explicit", 2)


def test_read_distribution_file(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("# three outcomes\n0.5\n0.25  # second\n\n0.25\n")
    d = read_distribution_file(str(path))
    assert d.probs == (0.5, 0.25, 0.25)
    assert shannon_entropy(d) == pytest.approx(1.5)


def test_read_distribution_file_rejects_garbage(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("0.5\nhalf\n")
    with pytest.raises(ValueError):
        read_distribution_file(str(path))
