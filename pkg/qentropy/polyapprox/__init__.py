from qentropy.polyapprox.approximation_utils import (
    approx_sqrt_log,
    chebyshev_interpolate,
    degree_law_exponent,
    make_Sk,
    make_step_poly,
)
from qentropy.polyapprox.bounded_poly import (
    DEGREE_CONSTANT,
    DEGREE_LAW_TOLERANCE,
    BoundedPoly,
    CertEntry,
    PolynomialConstructionError,
    UncertifiedPolynomialError,
    certify_poly,
    eval_poly,
    export_poly,
    first_failure,
    import_poly,
    recertify,
)
