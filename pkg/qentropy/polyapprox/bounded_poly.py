import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.fft import dct

logger = logging.getLogger(__name__)

# Degree budgets are DEGREE_CONSTANT times the scale of the relevant degree law.
DEGREE_CONSTANT = 32
# measured degree exponents must lie within this distance of 1
DEGREE_LAW_TOLERANCE = 0.25
GRID_FACTOR = 10
MIN_GRID = 64
BOUNDEDNESS_SLACK = 1e-9


class PolynomialConstructionError(ValueError):
    def __init__(self, message, achieved_error=None, degree=None):
        super().__init__(message)
        self.achieved_error = achieved_error
        self.degree = degree


class UncertifiedPolynomialError(ValueError):
    pass


def _sqrt_log_ratio(x, params):
    beta = params["beta"]
    return np.sqrt(np.log2(1.0 / x)) / (2.0 * math.sqrt(math.log2(1.0 / beta)))


def _level_sqrt_log(x, params):
    k = params["k"]
    return np.sqrt(np.log2(2.0 / x)) / (2.0 * math.sqrt(k + 1))


TARGETS = {
    "zero": lambda x, params: np.zeros_like(x),
    "one": lambda x, params: np.ones_like(x),
    "half": lambda x, params: np.full_like(x, 0.5),
    "sqrt_log": _sqrt_log_ratio,
    "level_sqrt_log": _level_sqrt_log,
}


def one_clause_bound(eps):
    """1 - sqrt(1 - eps^2) without cancellation."""
    return eps * eps / (1.0 + math.sqrt(1.0 - eps * eps))


def cert_spec(kind, params):
    """
    Returns the (interval, target_id, bound) triples a polynomial of `kind` must satisfy.
    """
    if kind == "step":
        phi, eps = params["phi"], params["eps"]
        spec = [((0.0, phi), "zero", eps)]
        if 2 * phi <= 1.0:
            spec.append(((2 * phi, 1.0), "one", one_clause_bound(eps)))
        spec.append(((0.0, 1.0), "half", 0.5))
        return spec
    if kind == "sqrt_log":
        beta = params["beta"]
        return [((beta, 1.0 - beta), "sqrt_log", params["eta"])]
    if kind == "level_sqrt_log":
        k = params["k"]
        return [((math.ldexp(1.0, -k), 1.0), "level_sqrt_log", params["eta"])]
    if kind == "chebyshev":
        return []
    raise ValueError(f"Unknown polynomial kind '{kind}'.")


@dataclass(frozen=True)
class CertEntry:
    interval: tuple
    target_id: str
    bound: float
    achieved: float = None

    @property
    def passed(self):
        return self.achieved is not None and self.achieved <= self.bound + BOUNDEDNESS_SLACK


@dataclass(frozen=True, eq=False)
class BoundedPoly:
    """
    A real polynomial in the Chebyshev basis with definite parity.

    `cert` holds the accuracy certificates measured on a grid of at least 10*degree first-kind
    Chebyshev nodes plus interval endpoints. `scale` is the factor applied when the raw
    projection exceeded 1 in sup norm; certificates are always measured after scaling.
    """

    coeffs: np.ndarray
    parity: str
    kind: str = "chebyshev"
    params: dict = field(default_factory=dict)
    cert: tuple = ()
    scale: float = 1.0
    sup_norm: float = None
    budget: int = None
    basis: str = "chebyshev"

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).ravel()
        if coeffs.size == 0:
            raise ValueError("A polynomial needs at least one coefficient.")
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity}.")
        wrong = coeffs[1::2] if self.parity == "even" else coeffs[0::2]
        if np.any(wrong != 0.0):
            raise ValueError(f"Coefficients of the wrong parity are nonzero for a {self.parity} polynomial.")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "cert", tuple(self.cert))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def certified(self):
        return (
            self.sup_norm is not None
            and self.sup_norm <= 1.0 + BOUNDEDNESS_SLACK
            and all(entry.passed for entry in self.cert)
        )

    @property
    def degree_ratio(self):
        """Measured degree divided by the degree-law scale (the empirical constant C)."""
        if self.budget is None:
            return None
        return self.degree * DEGREE_CONSTANT / self.budget

    def __call__(self, x):
        return eval_poly(self, x)

    def to_monomial(self):
        return np.polynomial.chebyshev.cheb2poly(self.coeffs)

    @classmethod
    def from_chebyshev(cls, coeffs, parity=None, kind="chebyshev", params=None):
        coeffs = np.array(coeffs, dtype=float).ravel()
        if parity is None:
            if not np.any(coeffs[1::2]):
                parity = "even"
            elif not np.any(coeffs[0::2]):
                parity = "odd"
            else:
                raise ValueError("Coefficients have mixed parity.")
        poly = cls(coeffs=coeffs, parity=parity, kind=kind, params=dict(params or {}))
        return certify_poly(poly)

    @classmethod
    def constant(cls, value=1.0):
        return cls.from_chebyshev([value], parity="even")

    @classmethod
    def identity(cls):
        return cls.from_chebyshev([0.0, 1.0], parity="odd")


def clenshaw(coeffs, x):
    """Evaluates sum_j coeffs[j] T_j(x) by Clenshaw's recurrence."""
    x = np.asarray(x, dtype=float)
    if len(coeffs) == 1:
        return np.full_like(x, coeffs[0])
    x2 = 2.0 * x
    b_curr = np.zeros_like(x)
    b_next = np.zeros_like(x)
    for c in coeffs[:0:-1]:
        b_curr, b_next = c + x2 * b_curr - b_next, b_curr
    return coeffs[0] + x * b_curr - b_next


def eval_poly(p, x):
    """
    Evaluates a BoundedPoly at x in [-1, 1] (scalar or array).

    Even polynomials are evaluated as a series in 2x^2 - 1, using T_2j(x) = T_j(2x^2 - 1).
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0) or np.any(np.isnan(x)):
        raise ValueError("eval_poly is defined on [-1, 1] only.")
    if p.parity == "even":
        values = clenshaw(p.coeffs[0::2], 2.0 * x * x - 1.0)
    else:
        values = clenshaw(p.coeffs, x)
    return float(values) if scalar else values


def roots_grid(size):
    return np.cos(np.pi * (np.arange(size) + 0.5) / size)


def values_on_roots(coeffs, size):
    """Values on the first-kind nodes cos(pi (k + 1/2) / size) through one DCT-III."""
    padded = np.zeros(size)
    padded[: len(coeffs)] = coeffs
    return (dct(padded, type=3) + padded[0]) / 2.0


def extrema_grid(size):
    return np.cos(np.pi * np.arange(size) / (size - 1))


def values_on_extrema(coeffs, size):
    """Values on the second-kind nodes cos(pi k / (size - 1)) through one DCT-I."""
    if size < len(coeffs) + 1:
        raise ValueError("extrema grid must exceed the number of coefficients.")
    padded = np.zeros(size)
    padded[: len(coeffs)] = coeffs
    return (dct(padded, type=1) + padded[0]) / 2.0


def grid_size(degree):
    return max(GRID_FACTOR * max(degree, 1), MIN_GRID)


def _sample(poly, offset):
    size = grid_size(poly.degree)
    if offset:
        size += 1
        return extrema_grid(size), values_on_extrema(poly.coeffs, size)
    return roots_grid(size), values_on_roots(poly.coeffs, size)


def _measure(poly, spec, offset):
    xs, values = _sample(poly, offset)
    edges = np.array([-1.0, 1.0])
    sup_norm = max(np.max(np.abs(values)), np.max(np.abs(eval_poly(poly, edges))))
    entries = []
    for (a, b), target_id, bound in spec:
        mask = (xs >= a) & (xs <= b)
        points = np.concatenate([xs[mask], [a, b]])
        approx = np.concatenate([values[mask], eval_poly(poly, np.array([a, b]))])
        target = TARGETS[target_id](points, poly.params)
        achieved = float(np.max(np.abs(approx - target)))
        entries.append(CertEntry(interval=(a, b), target_id=target_id, bound=bound, achieved=achieved))
    return float(sup_norm), entries


def certify_poly(poly, rescale=False):
    """
    Measures boundedness and every certificate of `poly` on the main grid.

    With `rescale`, a polynomial whose sup norm exceeds 1 is divided by it (with a warning)
    and re-measured.
    """
    spec = cert_spec(poly.kind, poly.params)
    sup_norm, entries = _measure(poly, spec, offset=False)
    if rescale and sup_norm > 1.0:
        warnings.warn(f"Rescaling {poly.kind} polynomial by 1/{sup_norm:.6g} to keep |P| <= 1.")
        poly = replace(poly, coeffs=poly.coeffs / sup_norm, scale=poly.scale / sup_norm)
        sup_norm, entries = _measure(poly, spec, offset=False)
    return replace(poly, cert=tuple(entries), sup_norm=sup_norm)


def recertify(poly, offset=True):
    """
    Re-measures every certificate entry on an independent grid.

    Returns (ok, entries) where ok requires each entry within twice its bound and |P| <= 1.
    """
    spec = cert_spec(poly.kind, poly.params)
    sup_norm, entries = _measure(poly, spec, offset=offset)
    ok = sup_norm <= 1.0 + BOUNDEDNESS_SLACK and all(
        entry.achieved <= 2 * entry.bound + BOUNDEDNESS_SLACK for entry in entries
    )
    return ok, entries


def first_failure(poly):
    """Names the first failing check of a certified-or-not polynomial, or None."""
    if poly.sup_norm is None or poly.sup_norm > 1.0 + BOUNDEDNESS_SLACK:
        return f"boundedness: sup |P| = {poly.sup_norm!r} > 1"
    for entry in poly.cert:
        if not entry.passed:
            a, b = entry.interval
            return (
                f"{entry.target_id} on [{a:.6g}, {b:.6g}]: achieved {entry.achieved:.6g} > bound {entry.bound:.6g}"
            )
    return None


def _format_value(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _parse_value(raw):
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def export_poly(poly, path):
    """
    Writes `basis degree parity kind key=value...` then one coefficient per line (17 digits).
    """
    header = [poly.basis, str(poly.degree), poly.parity, poly.kind]
    header += [f"{key}={_format_value(value)}" for key, value in sorted(poly.params.items())]
    header.append(f"scale={_format_value(poly.scale)}")
    with open(path, "w") as f:
        f.write(" ".join(header) + "\n")
        for c in poly.coeffs:
            f.write(f"{c:.17g}\n")
    logger.info(" Wrote degree %d %s polynomial to %s", poly.degree, poly.kind, path)


def import_poly(path):
    """Reads a coefficient file and re-certifies it against the certificates of its kind."""
    with open(path, "r") as f:
        lines = [line.strip() for line in f if line.strip()]
    if not lines:
        raise ValueError(f"{path} is empty.")
    header = lines[0].split()
    if len(header) < 4 or header[0] != "chebyshev":
        raise ValueError(f"{path}: malformed header '{lines[0]}'.")
    degree, parity, kind = int(header[1]), header[2], header[3]
    params = {}
    scale = 1.0
    for item in header[4:]:
        key, _, raw = item.partition("=")
        if key == "scale":
            scale = float(raw)
        else:
            params[key] = _parse_value(raw)
    try:
        coeffs = np.array([float(line) for line in lines[1:]])
    except ValueError as e:
        raise ValueError(f"{path}: unreadable coefficient ({e}).")
    if len(coeffs) != degree + 1:
        raise ValueError(f"{path}: header says degree {degree} but {len(coeffs)} coefficients follow.")
    poly = BoundedPoly(coeffs=coeffs, parity=parity, kind=kind, params=params, scale=scale)
    return certify_poly(poly)
