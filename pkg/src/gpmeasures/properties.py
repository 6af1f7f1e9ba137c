"""Executable checks of the axioms and propositions satisfied by G_p.

Each checker returns a :class:`CheckOutcome`. Ordinary checks pass when the
largest observed deviation stays within tolerance and carry a witness only
when they fail. Witness searches invert this: they pass when they find a
violation, and the witness is what they found.

All randomness flows from explicit integer seeds, so identical arguments give
identical outcomes, witnesses included.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analysis
from .measures import (
    DimensionMismatch,
    Distribution,
    MeasureError,
    _as_dist,
    angle_inequality,
    concat,
    format_exponent,
    g2_closed,
    g_infinity,
    g_p,
    g_p_naive,
    gini_naive,
    gini_sorted,
    parse_exponent,
    standard_vector,
    zero_count,
)

__all__ = [
    "PreconditionViolated",
    "CheckOutcome",
    "ComonotonePair",
    "is_comonotone",
    "make_comonotone_pair",
    "mix",
    "random_distribution",
    "grid_distribution",
    "equal_moment_pairs",
    "check_scale_invariance",
    "check_symmetry",
    "check_standardization",
    "check_comonotone_separability",
    "check_bounds",
    "check_zero_floor",
    "check_limit",
    "check_g2_extension_invariance",
    "check_g2_concat_invariance",
    "find_gini_merge_counterexample",
    "find_a4_violation",
    "run_axioms",
    "run_propositions",
    "run_counterexample",
    "run_suite",
    "SUITES",
]

DEFAULT_LAMBDAS = (1e-6, 0.5, 3.0, 1e6)
DEFAULT_BETAS = tuple(round(0.1 * k, 1) for k in range(1, 10))
EXTENSION_GRID = (0.0, 0.5, 1.0, 2.0, 10.0)
LIMIT_GRID = tuple(0.2 * k for k in range(6))
PAPER_MERGE_WITNESS = ((1, 4, 5), (2, 2, 6), 2)


class PreconditionViolated(MeasureError):
    """The inputs do not satisfy the hypotheses of the checked statement."""


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one property check or witness search.

    ``kind`` is ``"property"`` (expected to pass), ``"witness_search"``
    (passes when a violation is found) or ``"not_applicable"``.
    """

    name: str
    passed: bool
    deviation: float
    trials: int
    witness: dict | None = None
    kind: str = "property"
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.kind == "not_applicable" or self.passed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "passed": self.passed,
            "ok": self.ok,
            "deviation": self.deviation,
            "trials": self.trials,
            "params": _jsonable(self.params),
            "witness": _jsonable(self.witness),
        }


def _jsonable(obj):
    if isinstance(obj, Distribution):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return format_exponent(float(obj)) if math.isinf(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Fraction):
        return float(obj)
    return obj


def _property(name, deviation, tol, trials, witness, **params) -> CheckOutcome:
    passed = deviation <= tol
    return CheckOutcome(
        name=name,
        passed=passed,
        deviation=float(deviation),
        trials=trials,
        witness=None if passed else witness,
        params={**params, "tol": tol},
    )


# --------------------------------------------------------------------------
# comonotone pairs


def is_comonotone(x: Distribution, z: Distribution) -> bool:
    """True iff ``(x_i - x_j)(z_i - z_j) >= 0`` for every pair of positions.

    Sorting positions by ``(x, z)`` lexicographically, the pair is comonotone
    exactly when ``z`` is then non-decreasing.
    """
    x, z = _as_dist(x), _as_dist(z)
    if x.n != z.n:
        raise DimensionMismatch(f"length {x.n} != length {z.n}")
    order = np.lexsort((z.values, x.values))
    return bool(np.all(np.diff(z.values[order]) >= 0))


@dataclass(frozen=True)
class ComonotonePair:
    x: Distribution
    z: Distribution

    def __post_init__(self):
        if not is_comonotone(self.x, self.z):
            raise PreconditionViolated("vectors are not comonotone")
        sx, sz = self.x.total, self.z.total
        if abs(sx - sz) > 1e-12 * max(1.0, sx):
            raise PreconditionViolated(f"coordinate sums differ: {sx!r} vs {sz!r}")


def mix(pair: ComonotonePair, beta: float) -> Distribution:
    """Coordinate-wise ``beta * x + (1 - beta) * z``."""
    if not 0 <= beta <= 1:
        raise ValueError(f"mixing weight must lie in [0, 1], got {beta!r}")
    return Distribution(beta * pair.x.values + (1.0 - beta) * pair.z.values)


def make_comonotone_pair(n: int, seed: int) -> ComonotonePair:
    """Random comonotone pair of length ``n`` with equal coordinate sums.

    Both vectors are sorted draws placed through the same random permutation.
    The lower ranks of ``x`` are zeroed with probability 1/4 so that zeros and
    ties get exercised.
    """
    if n < 2:
        raise ValueError("comonotone pairs need n >= 2")
    rng = np.random.default_rng(seed)
    a = np.sort(rng.uniform(0.0, 10.0, n))
    b = np.sort(rng.uniform(0.0, 10.0, n))
    if rng.random() < 0.25:
        a[: rng.integers(0, n - 1, endpoint=True)] = 0.0
    b *= math.fsum(a.tolist()) / math.fsum(b.tolist())
    # push the rounding residual of the rescale into the top entry
    b[-1] += math.fsum(a.tolist()) - math.fsum(b.tolist())
    perm = rng.permutation(n)
    return ComonotonePair(Distribution(a[perm]), Distribution(b[perm]))


# --------------------------------------------------------------------------
# input generators


def random_distribution(
    rng: np.random.Generator,
    n_range: tuple[int, int] = (2, 64),
    high: float = 10.0,
    zero_frac: float = 0.1,
    tie_frac: float = 0.1,
) -> Distribution:
    """Uniform entries in ``[0, high]`` with injected zeros and ties."""
    n = int(rng.integers(n_range[0], n_range[1], endpoint=True))
    x = rng.uniform(0.0, high, n)
    ties = rng.random(n) < tie_frac
    x[ties] = x[rng.integers(0, n, ties.sum())]
    x[rng.random(n) < zero_frac] = 0.0
    if not np.any(x > 0):
        x[rng.integers(0, n)] = high / 2
    return Distribution(x)


def grid_distribution(rng: np.random.Generator, n_range: tuple[int, int] = (2, 16)) -> Distribution:
    """Entries drawn from ``{0, 0.2, ..., 1.0}``, at least one of them positive."""
    n = int(rng.integers(n_range[0], n_range[1], endpoint=True))
    idx = rng.integers(0, len(LIMIT_GRID), n)
    if not np.any(idx > 0):
        idx[rng.integers(0, n)] = len(LIMIT_GRID) - 1
    return Distribution(np.array(LIMIT_GRID)[idx])


def equal_moment_pairs(n: int = 3, max_value: int = 9, limit: int | None = None) -> list[tuple[Distribution, Distribution]]:
    """Distinct integer multisets with equal sums and equal sums of squares.

    Such pairs have equal G_2. Enumerates sorted vectors over
    ``{0, ..., max_value}`` and groups them by their first two power sums.
    """
    groups: dict[tuple[int, int], list[tuple[int, ...]]] = defaultdict(list)
    for combo in itertools.combinations_with_replacement(range(max_value + 1), n):
        if any(combo):
            groups[(sum(combo), sum(c * c for c in combo))].append(combo)
    pairs = []
    for key in sorted(groups):
        for x, y in itertools.combinations(groups[key], 2):
            pairs.append((Distribution(np.array(x, float)), Distribution(np.array(y, float))))
            if limit is not None and len(pairs) >= limit:
                return pairs
    return pairs


# --------------------------------------------------------------------------
# axioms


def check_scale_invariance(p, d: Distribution, lambdas: Iterable[float] = DEFAULT_LAMBDAS, tol: float = 1e-12) -> CheckOutcome:
    d = _as_dist(d)
    base = g_p(d, p).value
    worst, witness = 0.0, None
    lambdas = tuple(lambdas)
    for lam in lambdas:
        value = g_p(d.scaled(lam), p).value
        dev = abs(value - base)
        if dev > worst:
            worst = dev
            witness = {"d": d, "lambda": lam, "value": base, "scaled_value": value}
    return _property("A1 scale invariance", worst, tol, len(lambdas), witness, p=p)


def check_symmetry(p, d: Distribution, n_perms: int = 10, seed: int = 0, tol: float = 1e-14) -> CheckOutcome:
    d = _as_dist(d)
    rng = np.random.default_rng(seed)
    base = g_p(d, p).value
    orders = [np.arange(d.n), np.arange(d.n)[::-1]]
    orders += [rng.permutation(d.n) for _ in range(max(n_perms - 2, 0))]
    worst, witness = 0.0, None
    for order in orders:
        value = g_p(d.permuted(order), p).value
        dev = abs(value - base)
        if dev > worst:
            worst = dev
            witness = {"d": d, "permutation": order.tolist(), "value": base, "permuted_value": value}
    return _property("A2 symmetry", worst, tol, len(orders), witness, p=p)


def check_standardization(p, n: int, tol: float = 1e-12) -> CheckOutcome:
    worst, witness = 0.0, None
    for k in range(n):
        value = g_p(standard_vector(n, k), p).value
        dev = abs(value - k / n)
        if dev > worst:
            worst = dev
            witness = {"n": n, "k": k, "value": value, "expected": k / n}
    return _property("A3 standardization", worst, tol, n, witness, p=p, n=n)


def check_comonotone_separability(p, pair: ComonotonePair, betas: Iterable[float] = DEFAULT_BETAS, tol: float = 1e-10) -> CheckOutcome:
    worst, witness = 0.0, None
    gx, gz = g_p(pair.x, p).value, g_p(pair.z, p).value
    betas = tuple(betas)
    for beta in betas:
        mixed = g_p(mix(pair, beta), p).value
        linear = beta * gx + (1 - beta) * gz
        dev = abs(mixed - linear)
        if dev > worst:
            worst = dev
            witness = {"x": pair.x, "z": pair.z, "beta": beta, "mixed": mixed, "linear": linear}
    return _property("A4 comonotone separability", worst, tol, len(betas), witness, p=p)


def find_a4_violation(
    p=2,
    seed: int = 0,
    n_trials: int = 200,
    betas: Iterable[float] = DEFAULT_BETAS,
    threshold: float = 1e-6,
    n_range: tuple[int, int] = (2, 16),
) -> CheckOutcome:
    """Search random comonotone equal-sum pairs for a failure of A4 at ``p``."""
    rng = np.random.default_rng(seed)
    betas = tuple(betas)
    worst, witness = 0.0, None
    for _ in range(n_trials):
        n = int(rng.integers(n_range[0], n_range[1], endpoint=True))
        pair = make_comonotone_pair(n, int(rng.integers(2**32)))
        outcome = check_comonotone_separability(p, pair, betas, tol=0.0)
        if outcome.deviation > worst:
            worst = outcome.deviation
            witness = {**outcome.witness, "deviation": outcome.deviation}
    found = worst > threshold
    return CheckOutcome(
        name="A4 violation search",
        passed=found,
        deviation=worst,
        trials=n_trials,
        witness=witness if found else None,
        kind="witness_search",
        params={"p": p, "threshold": threshold, "seed": seed},
    )


# --------------------------------------------------------------------------
# propositions


def check_bounds(p, d: Distribution) -> CheckOutcome:
    d = _as_dist(d)
    value = g_p(d, p).value
    upper = (d.n - 1) / d.n
    dev = max(0.0, -value, value - upper)
    witness = {"d": d, "value": value, "upper": upper}
    return _property("bounds [0, (n-1)/n]", dev, 1e-12, 1, witness, p=p)


def check_zero_floor(d: Distribution, tol: float = 1e-12) -> CheckOutcome:
    """Gini is never below the share of zero entries."""
    d = _as_dist(d)
    value, floor = gini_sorted(d).value, zero_count(d) / d.n
    dev = max(0.0, floor - value)
    return _property("Gini >= zero share", dev, tol, 1, {"d": d, "value": value, "floor": floor})


def check_limit(d: Distribution, p_probe: float, tol: float) -> CheckOutcome:
    d = _as_dist(d)
    value, limit = g_p(d, p_probe).value, g_infinity(d).value
    dev = abs(value - limit)
    witness = {"d": d, "value": value, "limit": limit}
    return _property("limit p -> inf is zero share", dev, tol, 1, witness, p_probe=p_probe)


def _require_g2_match(x: Distribution, y: Distribution, tol: float):
    if x.n != y.n:
        raise DimensionMismatch(f"length {x.n} != length {y.n}")
    sx, sy = x.total, y.total
    if abs(sx - sy) > tol * max(1.0, abs(sx)):
        raise PreconditionViolated(f"sums differ: {sx!r} vs {sy!r}")
    gx, gy = g2_closed(x).value, g2_closed(y).value
    if abs(gx - gy) > tol:
        raise PreconditionViolated(f"G_2 values differ: {gx!r} vs {gy!r}")


def check_g2_extension_invariance(x: Distribution, y: Distribution, a: float, tol: float = 1e-12) -> CheckOutcome:
    """Equal sums and equal G_2 survive appending the same value ``a``."""
    x, y = _as_dist(x), _as_dist(y)
    _require_g2_match(x, y, tol)
    gx, gy = g2_closed(concat(x, a)).value, g2_closed(concat(y, a)).value
    witness = {"x": x, "y": y, "a": a, "extended_x": gx, "extended_y": gy}
    return _property("G2 extension invariance", abs(gx - gy), tol, 1, witness, a=a)


def check_g2_concat_invariance(x, y, z, t, tol: float = 1e-12) -> CheckOutcome:
    x, y, z, t = map(_as_dist, (x, y, z, t))
    _require_g2_match(x, y, tol)
    _require_g2_match(z, t, tol)
    gxz, gyt = g2_closed(concat(x, z)).value, g2_closed(concat(y, t)).value
    witness = {"x": x, "y": y, "z": z, "t": t, "xz": gxz, "yt": gyt}
    return _property("G2 concatenation invariance", abs(gxz - gyt), tol, 1, witness)


def _exact_gini(v: Sequence[int]) -> Fraction:
    n = len(v)
    return Fraction(sum(abs(a - b) for a in v for b in v), 2 * n * sum(v))


def _merge_witness(x, y, a) -> dict:
    xd, yd = Distribution(np.array(x, float)), Distribution(np.array(y, float))
    gxa, gya = gini_naive(concat(xd, a)).value, gini_naive(concat(yd, a)).value
    return {
        "x": xd,
        "y": yd,
        "a": float(a),
        "gini_x": gini_naive(xd).value,
        "gini_y": gini_naive(yd).value,
        "gini_xa": gxa,
        "gini_ya": gya,
        "deviation": abs(gxa - gya),
    }


def find_gini_merge_counterexample(
    search_seed: int = 0,
    n_trials: int = 10_000,
    sizes: Sequence[int] = (3, 4),
    max_value: int = 9,
    threshold: float = 1e-6,
    max_witnesses: int = 25,
) -> CheckOutcome:
    """Find x, y with equal sums and equal Gini whose extensions by ``a`` differ.

    The known witness x=(1,4,5), y=(2,2,6), a=2 is always reported first.
    Random integer candidates are filtered with exact rational arithmetic.
    """
    rng = np.random.default_rng(search_seed)
    witnesses = [_merge_witness(*PAPER_MERGE_WITNESS)]
    seen = {(tuple(sorted(PAPER_MERGE_WITNESS[0])), tuple(sorted(PAPER_MERGE_WITNESS[1])), PAPER_MERGE_WITNESS[2])}
    for _ in range(n_trials):
        n = int(rng.choice(sizes))
        x = tuple(sorted(int(v) for v in rng.integers(0, max_value, n, endpoint=True)))
        y = tuple(sorted(int(v) for v in rng.integers(0, max_value, n, endpoint=True)))
        a = int(rng.integers(0, max_value, endpoint=True))
        if x == y or sum(x) == 0 or sum(x) != sum(y):
            continue
        if _exact_gini(x) != _exact_gini(y):
            continue
        if _exact_gini(x + (a,)) == _exact_gini(y + (a,)):
            continue
        key = (min(x, y), max(x, y), a)
        if key in seen:
            continue
        w = _merge_witness(key[0], key[1], a)
        if w["deviation"] > threshold:
            seen.add(key)
            witnesses.append(w)
            if len(witnesses) >= max_witnesses:
                break
    found = len(witnesses) - 1
    return CheckOutcome(
        name="Gini merge counterexample",
        passed=True,
        deviation=witnesses[0]["deviation"],
        trials=n_trials,
        witness={"witnesses": witnesses, "found_by_search": found},
        kind="witness_search",
        params={"seed": search_seed, "threshold": threshold},
    )


# --------------------------------------------------------------------------
# suites


def _aggregate(name: str, outcomes: list[CheckOutcome], **params) -> CheckOutcome:
    worst = max(outcomes, key=lambda o: o.deviation)
    failed = next((o for o in outcomes if not o.passed), None)
    return CheckOutcome(
        name=name,
        passed=failed is None,
        deviation=worst.deviation,
        trials=sum(o.trials for o in outcomes),
        witness=None if failed is None else failed.witness,
        params={**worst.params, **params},
    )


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, *stream])


def _axioms_for_p(p: float, index: int, trials: int, seed: int) -> list[CheckOutcome]:
    label = f"[p={format_exponent(p)}]"
    rng = _rng(seed, 1, index)
    corpus = [random_distribution(rng) for _ in range(trials)]
    out = [
        _aggregate(f"A1 scale invariance {label}", [check_scale_invariance(p, d) for d in corpus], p=p),
        _aggregate(
            f"A2 symmetry {label}",
            [check_symmetry(p, d, n_perms=4, seed=int(rng.integers(2**32))) for d in corpus],
            p=p,
        ),
        _aggregate(f"A3 standardization {label}", [check_standardization(p, n) for n in range(1, 17)], p=p),
    ]
    if p == 1:
        pair_rng = _rng(seed, 2, index)
        pairs = [
            make_comonotone_pair(int(pair_rng.integers(2, 64, endpoint=True)), int(pair_rng.integers(2**32)))
            for _ in range(trials)
        ]
        out.append(
            _aggregate(f"A4 comonotone separability {label}", [check_comonotone_separability(p, pr) for pr in pairs], p=p)
        )
    elif p == 2:
        found = find_a4_violation(p, seed=seed, n_trials=max(10, min(trials, 200)))
        out.append(replace(found, name=f"A4 violation search {label}"))
    else:
        out.append(
            CheckOutcome(
                name=f"A4 comonotone separability {label}",
                passed=False,
                deviation=0.0,
                trials=0,
                kind="not_applicable",
                params={"p": p, "reason": "A4 is only claimed for p = 1 and refuted for p = 2"},
            )
        )
    return out


def _map(fn: Callable, args: list[tuple], jobs: int) -> list:
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*args)))
    return [fn(*a) for a in args]


def run_axioms(ps: Iterable = (1, 2, 3, math.inf), trials: int = 1000, seed: int = 0, jobs: int = 1) -> list[CheckOutcome]:
    ps = [parse_exponent(p) for p in ps]
    per_p = _map(_axioms_for_p, [(p, i, trials, seed) for i, p in enumerate(ps)], jobs)
    return [o for group in per_p for o in group]


def run_propositions(
    ps: Iterable = (1, 1.5, 2, 3, 10, math.inf),
    trials: int = 1000,
    seed: int = 0,
    jobs: int = 1,
) -> list[CheckOutcome]:
    ps = [parse_exponent(p) for p in ps]
    rng = _rng(seed, 3)
    corpus = [random_distribution(rng) for _ in range(trials)]
    out = [
        _aggregate(f"bounds [0, (n-1)/n] [p={format_exponent(p)}]", [check_bounds(p, d) for d in corpus], p=p)
        for p in ps
    ]
    out.append(_aggregate("Gini >= zero share", [check_zero_floor(d) for d in corpus]))

    theorem = [
        _property("angle = G2", abs(angle_inequality(d).value - g_p_naive(d, 2).value), 1e-12, 1, {"d": d})
        for d in corpus
    ]
    out.append(_aggregate("angle measure equals G2", theorem))
    fast = [
        _property("sorted Gini = naive Gini", _rel_dev(gini_sorted(d).value, gini_naive(d).value), 1e-12, 1, {"d": d})
        for d in corpus
    ]
    out.append(_aggregate("sorted Gini equals naive Gini (relative)", fast))

    grid_rng = _rng(seed, 4)
    grid = [grid_distribution(grid_rng) for _ in range(max(trials // 10, 10))]
    out.append(_aggregate("limit p -> inf is zero share", [check_limit(d, 600, 1e-9) for d in grid]))

    closed = [
        _property("two-point closed form", abs(g_p([1, 2], p).value - analysis.two_point_closed_form(p)), 1e-12, 1, {"p": p})
        for p in range(1, 26)
    ]
    out.append(_aggregate("G_p(1,2) = 1/(2(2^p+1))", closed))

    pairs = equal_moment_pairs(3)
    out.append(
        _aggregate(
            "G2 extension invariance",
            [check_g2_extension_invariance(x, y, a) for x, y in pairs for a in EXTENSION_GRID],
        )
    )
    quads = [(x, y, z, t) for (x, y), (z, t) in zip(pairs, pairs[1:] + pairs[:1])]
    out.append(_aggregate("G2 concatenation invariance", [check_g2_concat_invariance(*q) for q in quads]))
    return out


def _rel_dev(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def run_counterexample(seed: int = 0, trials: int = 10_000) -> list[CheckOutcome]:
    return [find_gini_merge_counterexample(seed, trials), find_a4_violation(2, seed=seed)]


SUITES = ("axioms", "propositions", "counterexample", "all")


def run_suite(suite: str, trials: int = 1000, seed: int = 0, ps: Iterable | None = None, jobs: int = 1) -> list[CheckOutcome]:
    """Run a named suite. ``ps`` overrides the default exponent list."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    out: list[CheckOutcome] = []
    if suite in ("axioms", "all"):
        out += run_axioms(ps if ps is not None else (1, 2, 3, math.inf), trials, seed, jobs)
    if suite in ("propositions", "all"):
        out += run_propositions(ps if ps is not None else (1, 1.5, 2, 3, 10, math.inf), trials, seed, jobs)
    if suite in ("counterexample", "all"):
        out += run_counterexample(seed, max(trials, 10_000))
    return out
