"""Sweeps of G_p over the exponent and convergence diagnostics."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable

from .measures import (
    DEFAULT_TOL,
    Distribution,
    MeasureError,
    Tolerance,
    _as_dist,
    format_exponent,
    g_p,
    parse_exponent,
)

__all__ = [
    "DENOMINATOR_MODES",
    "DegenerateTable",
    "SweepTable",
    "ConvergenceFit",
    "p_sweep",
    "two_point_closed_form",
    "fit_convergence",
]

DENOMINATOR_MODES = ("def3", "unbiased")

# deviations below this are treated as underflowed and skipped by the fit
_DEVIATION_FLOOR = 1e-15


class DegenerateTable(MeasureError):
    """A sweep carries too little signal to estimate a convergence rate."""


@dataclass(frozen=True)
class SweepTable:
    input: Distribution
    rows: tuple[tuple[float, float], ...]
    denominator_mode: str = "def3"

    @property
    def ps(self) -> list[float]:
        return [p for p, _ in self.rows]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.rows]

    def to_dict(self) -> dict:
        return {
            "input": self.input.tolist(),
            "denominator_mode": self.denominator_mode,
            "rows": [{"p": format_exponent(p), "value": v} for p, v in self.rows],
        }


@dataclass(frozen=True)
class ConvergenceFit:
    limit: float
    rate: float
    n_ratios: int

    def to_dict(self) -> dict:
        return {"limit": self.limit, "rate": self.rate, "n_ratios": self.n_ratios}


def unbiased_factor(n: int) -> float:
    """Ratio between the ``2 n (n - 1)`` denominator convention and the default."""
    return n / (n - 1) if n > 1 else 0.0


def p_sweep(
    d: Distribution,
    ps: Iterable,
    mode: str = "def3",
    tol: Tolerance = DEFAULT_TOL,
) -> SweepTable:
    """Evaluate G_p for every exponent in ``ps``.

    Rows come back sorted by ``p`` with infinity last. In ``"unbiased"`` mode
    every value (the infinite row included) is multiplied by ``n / (n - 1)``,
    which reproduces tables computed with a ``2 n (n - 1)`` normalisation.
    """
    if mode not in DENOMINATOR_MODES:
        raise ValueError(f"unknown denominator mode {mode!r}")
    d = _as_dist(d)
    exps = sorted(parse_exponent(p) for p in ps)
    factor = 1.0 if mode == "def3" else unbiased_factor(d.n)
    rows = tuple((p, g_p(d, p, tol).value * factor) for p in exps)
    return SweepTable(d, rows, mode)


def two_point_closed_form(p) -> float:
    """Exact G_p of the vector (1, 2): ``1 / (2 (2**p + 1))``."""
    p = parse_exponent(p)
    if math.isinf(p):
        return 0.0
    return 0.5 / (2.0 ** p + 1.0)


def fit_convergence(table: SweepTable) -> ConvergenceFit:
    """Estimate the geometric rate at which G_p approaches its limit.

    The limit is the infinite row. Each pair of consecutive finite rows gives
    a per-unit-p ratio ``(dev_b / dev_a) ** (1 / (p_b - p_a))``; the rate is
    the median of these ratios.
    """
    finite = [(p, v) for p, v in table.rows if math.isfinite(p)]
    limits = [v for p, v in table.rows if math.isinf(p)]
    if len(finite) < 3 or not limits:
        raise DegenerateTable("need at least three finite rows and the infinite row")
    limit = limits[0]
    devs = [(p, abs(v - limit)) for p, v in finite]
    ratios = [
        (db / da) ** (1.0 / (pb - pa))
        for (pa, da), (pb, db) in zip(devs, devs[1:])
        if da > _DEVIATION_FLOOR and db > _DEVIATION_FLOOR and pb > pa
    ]
    if not ratios:
        raise DegenerateTable("all deviations from the limit are below 1e-15")
    return ConvergenceFit(limit, statistics.median(ratios), len(ratios))
