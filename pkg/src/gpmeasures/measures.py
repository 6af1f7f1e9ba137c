"""Inequality measures of the G_p family and the angle measures.

Every measure consumes a :class:`Distribution`, a validated non-negative
vector with at least one positive entry. The central quantity is

    G_p(x) = sum_{i,j} |x_i - x_j|**p / (2 n sum_i x_i**p),     p >= 1

which is the Gini coefficient for ``p = 1``, the squared sine of the angle
between ``x`` and the all-ones vector for ``p = 2``, and tends to the share
of zero entries as ``p -> inf``.

Double sums are accumulated with :func:`math.fsum`, which returns the
correctly rounded sum of its inputs. The result is therefore independent of
the order of the terms, so the naive evaluations are exactly permutation
invariant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "MeasureError",
    "DistributionError",
    "NegativeEntry",
    "AllZero",
    "Empty",
    "NonFiniteEntry",
    "InvalidExponent",
    "InvalidParams",
    "DimensionMismatch",
    "InvalidK",
    "Tolerance",
    "DEFAULT_TOL",
    "Distribution",
    "MeasureReport",
    "IIDParams",
    "new_distribution",
    "parse_exponent",
    "zero_count",
    "one_count",
    "gini_naive",
    "gini_sorted",
    "g_p_naive",
    "g_infinity",
    "g_p",
    "g2_closed",
    "angle_inequality",
    "angle_disproportionality",
    "salton_cosine",
    "iid_measure",
    "standard_vector",
    "concat",
    "lorenz_points",
    "lorenz_gini",
]

# Above this size the pairwise terms are generated row by row instead of
# materializing the full upper triangle.
_VECTORIZE_MAX_N = 1024


class MeasureError(ValueError):
    """Base class for all errors raised by this package."""


class DistributionError(MeasureError):
    """The input is not a member of the non-negative, non-zero orthant."""


class NegativeEntry(DistributionError):
    pass


class AllZero(DistributionError):
    pass


class Empty(DistributionError):
    pass


class NonFiniteEntry(DistributionError):
    pass


class InvalidExponent(MeasureError):
    pass


class InvalidParams(MeasureError):
    pass


class DimensionMismatch(MeasureError):
    pass


class InvalidK(MeasureError):
    pass


@dataclass(frozen=True)
class Tolerance:
    """Tolerances used for value classification and equality assertions.

    ``rel_eps`` is relative to ``max(x)`` when counting zeros and absolute
    around 1 when counting ones. ``cmp_eps`` is the default slack for checks.
    """

    rel_eps: float = 1e-9
    cmp_eps: float = 1e-12

    def __post_init__(self):
        if not (self.rel_eps > 0 and self.cmp_eps > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class Distribution:
    """A vector in the non-negative orthant with at least one positive entry.

    The stored array is a read-only float64 copy of the input.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise Empty("distribution must have at least one entry")
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise NonFiniteEntry(f"entry {bad[0]} is not finite: {arr[bad[0]]!r}")
        neg = np.flatnonzero(arr < 0)
        if neg.size:
            raise NegativeEntry(f"entry {neg[0]} is negative: {arr[neg[0]]!r}")
        if not np.any(arr > 0):
            raise AllZero("distribution has no positive entry")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def total(self) -> float:
        return math.fsum(self.values.tolist())

    @property
    def mean(self) -> float:
        return self.total / self.n

    def scaled(self, factor: float) -> "Distribution":
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return Distribution(self.values * factor)

    def permuted(self, order: Sequence[int]) -> "Distribution":
        return Distribution(self.values[np.asarray(order)])

    def tolist(self) -> list[float]:
        return self.values.tolist()

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(tuple(self.values.tolist()))

    def __repr__(self):
        return f"Distribution({self.values.tolist()!r})"


def new_distribution(values: Iterable[float]) -> Distribution:
    """Validate ``values`` and wrap them as a :class:`Distribution`."""
    if isinstance(values, Distribution):
        return values
    if not isinstance(values, np.ndarray):
        values = list(values)
    return Distribution(values)


@dataclass(frozen=True)
class IIDParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidParams(f"alpha must lie in (0, inf), got {self.alpha!r}")
        if not (0 <= self.beta <= 1):
            raise InvalidParams(f"beta must lie in [0, 1], got {self.beta!r}")


@dataclass(frozen=True)
class MeasureReport:
    """Value of a measure together with how it was obtained."""

    value: float
    measure_id: str
    p_used: Union[float, tuple, None]
    n: int
    algorithm: str
    zeros: int | None = field(default=None)

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        if isinstance(self.p_used, tuple):
            p = {"alpha": self.p_used[0], "beta": self.p_used[1]}
        elif self.p_used is None:
            p = None
        else:
            p = format_exponent(self.p_used)
        return {
            "value": self.value,
            "measure_id": self.measure_id,
            "p_used": p,
            "n": self.n,
            "algorithm": self.algorithm,
            "zeros": self.zeros,
        }


def parse_exponent(p) -> float:
    """Return ``p`` as a float exponent, accepting ``inf`` tokens.

    Raises :class:`InvalidExponent` for anything below 1 or not a number.
    """
    if isinstance(p, str):
        token = p.strip().lower()
        if token in ("inf", "+inf", "infinity", "∞"):
            return math.inf
        try:
            p = float(token)
        except ValueError:
            raise InvalidExponent(f"not an exponent: {p!r}") from None
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise InvalidExponent(f"not an exponent: {p!r}") from None
    if math.isnan(value) or value < 1:
        raise InvalidExponent(f"exponent must satisfy p >= 1, got {p!r}")
    return value


def format_exponent(p: float) -> Union[float, str]:
    """JSON-friendly exponent: ``"inf"`` for infinity, the float otherwise."""
    return "inf" if math.isinf(p) else float(p)


def _as_dist(d) -> Distribution:
    return d if isinstance(d, Distribution) else new_distribution(d)


def _pow2_normalized(x: np.ndarray) -> np.ndarray:
    # exact rescaling so that max(x) lies in [0.5, 1)
    _, exponent = math.frexp(float(x.max()))
    return np.ldexp(x, -exponent)


def _fsum(arr: np.ndarray) -> float:
    return math.fsum(arr.tolist())


def _pairwise_power_sum(x: np.ndarray, p: float) -> float:
    """Correctly rounded sum of |x_i - x_j|**p over all ordered pairs."""
    n = x.size
    if n < 2:
        return 0.0

    def powered(diffs):
        return diffs if p == 1 else np.power(diffs, p)

    if n <= _VECTORIZE_MAX_N:
        i, j = np.triu_indices(n, 1)
        terms = powered(np.abs(x[i] - x[j])).tolist()
    else:
        terms = itertools.chain.from_iterable(
            powered(np.abs(x[k + 1:] - x[k])).tolist() for k in range(n - 1)
        )
    # every unordered pair appears twice in the full double sum
    return 2.0 * math.fsum(terms)


def _two_product(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Error-free product: ``a * b == prod + err`` exactly (Dekker/Veltkamp)."""
    prod = a * b
    split = 134217729.0  # 2**27 + 1
    ca = split * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = split * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - prod) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return prod, err


def _g2_moments(x: np.ndarray) -> float:
    # centered second moment over raw second moment; no cancellation
    x = _pow2_normalized(x)
    mean = _fsum(x) / x.size
    # one refinement step; makes constant vectors come out exactly zero
    mean += _fsum(x - mean) / x.size
    dev = x - mean
    return _fsum(dev * dev) / _fsum(x * x)


# --------------------------------------------------------------------------
# counting


def zero_count(d: Distribution, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of entries no larger than ``tol.rel_eps * max(x)``."""
    x = _as_dist(d).values
    return int(np.count_nonzero(x <= tol.rel_eps * x.max()))


def one_count(d: Distribution, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of entries within ``tol.rel_eps`` of 1. No rescaling is applied."""
    x = _as_dist(d).values
    return int(np.count_nonzero(np.abs(x - 1.0) <= tol.rel_eps))


# --------------------------------------------------------------------------
# G_p family


def _iid_value(x: np.ndarray, alpha: float, beta: float) -> float:
    n = x.size
    mean = _fsum(x) / n
    return _pairwise_power_sum(x, alpha) / (2.0 * n * n * mean ** beta)


def gini_naive(d: Distribution) -> MeasureReport:
    """Gini coefficient from the O(n^2) mean absolute difference."""
    d = _as_dist(d)
    value = _iid_value(d.values, 1.0, 1.0)
    return MeasureReport(value, "g_p", 1.0, d.n, "naive_pairwise")


def gini_sorted(d: Distribution) -> MeasureReport:
    """Gini coefficient in O(n log n) from the rank-weighted sorted sum.

    Uses ``G = sum_i (2i - n - 1) x_(i) / (n sum x)`` with 1-based ranks on the
    ascending sort. Tied values may be ordered arbitrarily.
    """
    d = _as_dist(d)
    n = d.n
    s = np.sort(_pow2_normalized(d.values), kind="stable")
    weights = 2.0 * np.arange(1, n + 1, dtype=float) - (n + 1)
    prod, err = _two_product(weights, s)
    numerator = math.fsum(itertools.chain(prod.tolist(), err.tolist()))
    value = numerator / (n * _fsum(s))
    return MeasureReport(max(value, 0.0), "g_p", 1.0, n, "sorted")


def g_p_naive(d: Distribution, p: float) -> MeasureReport:
    """Definitional O(n^2) evaluation of G_p for finite ``p >= 1``.

    The input is divided by its maximum first so that no power overflows;
    G_p is scale invariant, so the value is unaffected.
    """
    d = _as_dist(d)
    p = parse_exponent(p)
    if math.isinf(p):
        raise InvalidExponent("g_p_naive needs a finite exponent; use g_infinity")
    x = d.values / d.values.max()
    numerator = _pairwise_power_sum(x, p)
    denominator = 2.0 * d.n * _fsum(np.power(x, p))
    return MeasureReport(numerator / denominator, "g_p", p, d.n, "naive_pairwise")


def g_infinity(d: Distribution, tol: Tolerance = DEFAULT_TOL) -> MeasureReport:
    """Limit of G_p as p grows: the share of zero entries."""
    d = _as_dist(d)
    zeros = zero_count(d, tol)
    return MeasureReport(zeros / d.n, "g_p", math.inf, d.n, "zero_count", zeros=zeros)


def g2_closed(d: Distribution) -> MeasureReport:
    """G_2 in O(n) as ``1 - mean(x)**2 / mean(x**2)``.

    Evaluated as the centered second moment over the raw second moment,
    which is the same quantity without the cancellation.
    """
    d = _as_dist(d)
    return MeasureReport(_g2_moments(d.values), "g_p", 2.0, d.n, "moments")


def g_p(d: Distribution, p, tol: Tolerance = DEFAULT_TOL) -> MeasureReport:
    """G_p using the fastest exact route for ``p``.

    ``p = 1`` goes through the sorted Gini form, ``p = 2`` through moments,
    ``p = inf`` through the zero count, anything else through the pairwise
    definition.
    """
    p = parse_exponent(p)
    if p == 1:
        return gini_sorted(d)
    if p == 2:
        return g2_closed(d)
    if math.isinf(p):
        return g_infinity(d, tol)
    return g_p_naive(d, p)


# --------------------------------------------------------------------------
# angle measures


def angle_inequality(d: Distribution) -> MeasureReport:
    """Squared sine of the angle between ``x`` and the all-ones vector.

    Identical to :func:`g2_closed`; only the reported measure id differs.
    """
    d = _as_dist(d)
    return MeasureReport(_g2_moments(d.values), "angle", None, d.n, "moments")


def _check_pair(x, y) -> tuple[Distribution, Distribution]:
    x, y = _as_dist(x), _as_dist(y)
    if x.n != y.n:
        raise DimensionMismatch(f"length {x.n} != length {y.n}")
    return x, y


def _unit(x: np.ndarray) -> np.ndarray:
    x = _pow2_normalized(x)
    return x / math.sqrt(_fsum(x * x))


def salton_cosine(x: Distribution, y: Distribution) -> MeasureReport:
    """Cosine of the angle between two non-negative vectors."""
    x, y = _check_pair(x, y)
    u, v = _unit(x.values), _unit(y.values)
    value = min(max(_fsum(u * v), 0.0), 1.0)
    return MeasureReport(value, "cosine", None, x.n, "moments")


def angle_disproportionality(x: Distribution, y: Distribution) -> MeasureReport:
    """``1 - cos(x, y)**2``, the squared sine of the angle between x and y.

    Computed as ``|u - v|**2 |u + v|**2 / 4`` on the unit vectors, which is
    symmetric in the arguments and accurate for nearly parallel inputs.
    """
    x, y = _check_pair(x, y)
    u, v = _unit(x.values), _unit(y.values)
    diff, summ = u - v, u + v
    value = _fsum(diff * diff) * _fsum(summ * summ) / 4.0
    return MeasureReport(min(max(value, 0.0), 1.0), "angle", None, x.n, "moments")


def iid_measure(d: Distribution, params: IIDParams) -> MeasureReport:
    """Inter-individual differences index ``sum |x_i - x_j|**alpha / (2 n^2 mean**beta)``.

    Not scale invariant unless ``alpha == beta`` and not bounded by 1.
    """
    d = _as_dist(d)
    if not isinstance(params, IIDParams):
        params = IIDParams(*params)
    value = _iid_value(d.values, float(params.alpha), float(params.beta))
    return MeasureReport(value, "iid", (params.alpha, params.beta), d.n, "naive_pairwise")


# --------------------------------------------------------------------------
# constructions


def standard_vector(n: int, k: int) -> Distribution:
    """``k`` zeros followed by ``n - k`` entries equal to ``1 / (n - k)``."""
    if n < 1:
        raise InvalidK(f"n must be positive, got {n}")
    if not 0 <= k < n:
        raise InvalidK(f"need 0 <= k < n, got k={k}, n={n}")
    return Distribution(np.array([0.0] * k + [1.0 / (n - k)] * (n - k)))


def concat(x: Distribution, suffix) -> Distribution:
    """Append a scalar ``a >= 0`` or a whole distribution to ``x``."""
    x = _as_dist(x)
    if isinstance(suffix, Distribution):
        tail = suffix.values
    elif np.ndim(suffix) == 0:
        a = float(suffix)
        if a < 0:
            raise NegativeEntry(f"appended value is negative: {a!r}")
        tail = np.array([a])
    else:
        tail = _as_dist(suffix).values
    return Distribution(np.concatenate([x.values, tail]))


def lorenz_points(d: Distribution) -> np.ndarray:
    """Lorenz curve as an ``(n + 1, 2)`` array of (population share, value share)."""
    d = _as_dist(d)
    s = np.sort(d.values)
    cum = np.concatenate([[0.0], np.cumsum(s)]) / d.total
    cum[-1] = 1.0
    pop = np.arange(d.n + 1, dtype=float) / d.n
    return np.column_stack([pop, cum])


def lorenz_gini(points: np.ndarray) -> float:
    """Twice the area between the diagonal and a piecewise-linear Lorenz curve."""
    pts = np.asarray(points, dtype=float)
    widths = np.diff(pts[:, 0])
    heights = pts[1:, 1] + pts[:-1, 1]
    return 1.0 - math.fsum((widths * heights).tolist())
