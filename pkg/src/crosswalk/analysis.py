"""Straight-line fits of mean trust against iteration, with coefficient bands.

Band half-width is ``t * sqrt(var(b))``.  By default ``t`` is the confidence
level itself (0.2 ... 0.99) used directly as the multiplier; ``quantile=True``
swaps in the two-sided Student-t quantile with n - 2 degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from crosswalk.engine import BatchResult

DEFAULT_LEVELS = (0.2, 0.4, 0.6, 0.8, 0.99)
SCENARIO_IDS = (1, 2, 3, 4)


@dataclass(frozen=True)
class RegressionFit:
    intercept: float
    slope: float
    residual_mse: float
    coefficient_variances: tuple[float, float]
    n: int

    def __post_init__(self) -> None:
        if self.residual_mse < 0 or min(self.coefficient_variances) < 0:
            raise ValueError("variances must be non-negative")

    @property
    def coefficients(self) -> tuple[float, float]:
        return (self.intercept, self.slope)

    @property
    def std_errors(self) -> tuple[float, float]:
        return tuple(math.sqrt(v) for v in self.coefficient_variances)


@dataclass(frozen=True)
class ConfidenceBand:
    level: float
    multiplier: float
    lower: tuple[float, float]
    upper: tuple[float, float]

    @property
    def widths(self) -> tuple[float, float]:
        return tuple(u - l for l, u in zip(self.lower, self.upper))


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> RegressionFit:
    """Ordinary least squares of ``ys`` on ``[1 | xs]``."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d and the same length")
    n = len(x)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    if np.all(x == x[0]):
        raise ValueError("singular design")
    X = np.column_stack([np.ones(n), x])
    # lstsq is better conditioned than forming the normal equations directly
    b, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ b
    s2 = float(resid @ resid) / (n - 2)
    xtx_inv = np.linalg.inv(X.T @ X)
    var = np.clip(np.diag(xtx_inv) * s2, 0.0, None)
    return RegressionFit(float(b[0]), float(b[1]), s2, (float(var[0]), float(var[1])), n)


def band_multiplier(t: float, n: int, quantile: bool = False) -> float:
    if t < 0:
        raise ValueError(f"t={t} must be non-negative")
    if not quantile:
        return float(t)
    if t >= 1:
        raise ValueError("quantile mode needs a confidence level below 1")
    return float(stats.t.ppf(0.5 + t / 2.0, df=n - 2))


def confidence_bounds(fit: RegressionFit, t: float, quantile: bool = False) -> ConfidenceBand:
    m = band_multiplier(t, fit.n, quantile)
    half = tuple(m * se for se in fit.std_errors)
    coef = fit.coefficients
    return ConfidenceBand(
        level=float(t),
        multiplier=m,
        lower=tuple(c - h for c, h in zip(coef, half)),
        upper=tuple(c + h for c, h in zip(coef, half)),
    )


@dataclass(frozen=True)
class ScenarioReport:
    fits: Mapping[int, RegressionFit]
    bands: Mapping[int, tuple[ConfidenceBand, ...]]
    final_trust: Mapping[int, float]
    mean_steps: Mapping[int, float]
    variance: Mapping[int, float]
    gap_vs_s4: float
    gap_vs_s1: float
    variance_ranking: tuple[int, ...]

    def variance_rank(self, sid: int) -> int:
        """1 for the largest variance."""
        return self.variance_ranking.index(sid) + 1


def _relative_gap(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / abs(b) if b != 0 else math.inf


def scenario_report(
    batches: Sequence[BatchResult] | Mapping[int, BatchResult],
    levels: Sequence[float] = DEFAULT_LEVELS,
    quantile: bool = False,
) -> ScenarioReport:
    """Fits, bands and cross-scenario comparisons for the four scenarios.

    ``gap_vs_s4`` is |T1 - T4| / |T4| and ``gap_vs_s1`` is |T1 - T4| / |T1|,
    with T the final mean trust.
    """
    by_id = dict(batches) if isinstance(batches, Mapping) else {b.scenario_id: b for b in batches}
    missing = [sid for sid in SCENARIO_IDS if sid not in by_id]
    if missing:
        raise ValueError(f"missing scenario(s): {missing}")
    fits, bands = {}, {}
    for sid in SCENARIO_IDS:
        trace = by_id[sid].mean_trace
        fit = fit_line(np.arange(1, len(trace) + 1), trace)
        fits[sid] = fit
        bands[sid] = tuple(confidence_bounds(fit, t, quantile) for t in levels)
    final = {sid: by_id[sid].final_trust for sid in SCENARIO_IDS}
    variance = {sid: by_id[sid].variance_score for sid in SCENARIO_IDS}
    # stable sort: ties keep scenario order
    ranking = tuple(sorted(SCENARIO_IDS, key=lambda s: -variance[s]))
    return ScenarioReport(
        fits=fits,
        bands=bands,
        final_trust=final,
        mean_steps={sid: by_id[sid].mean_steps for sid in SCENARIO_IDS},
        variance=variance,
        gap_vs_s4=_relative_gap(final[1], final[4]),
        gap_vs_s1=_relative_gap(final[4], final[1]),
        variance_ranking=ranking,
    )
