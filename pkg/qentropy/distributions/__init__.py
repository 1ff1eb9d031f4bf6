from qentropy.distributions.distribution_utils import (
    FAMILIES,
    Distribution,
    binary_entropy,
    make_distribution,
    read_distribution_file,
    shannon_entropy,
)
