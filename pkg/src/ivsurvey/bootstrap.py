"""Bootstrap hypothesis tests, percentile confidence intervals, and
per-respondent agreement metrics (Pearson r, mean square error).

Test construction
-----------------
One-sample tests resample the t statistic under the null: the sample is
shifted so its mean equals the hypothesized value, B resamples with
replacement are drawn, and the two-tailed p-value is computed with
add-one smoothing,

    p = (1 + #{|t*| >= |t_obs|}) / (B + 1),

so p is never below 1/(B+1). Percentile confidence intervals come from
the same resamples applied to the unshifted data. A resample with zero
variance yields t* = 0 when its mean sits exactly on the null value and
an infinite t* otherwise; the exhaustive-enumeration oracle in the test
suite uses the same convention.

Determinism
-----------
Every operation builds its own ``numpy.random.default_rng(seed)``, so a
given (values, mu0, B, seed) always produces the identical result.
Replication studies should derive independent per-replicate seeds via
``numpy.random.SeedSequence(seed).spawn(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DegenerateSampleError(ValueError):
    """Sample too small or with zero variance for the requested test."""


class UndefinedCorrelationError(ValueError):
    """Correlation undefined because one input is constant."""


@dataclass(frozen=True)
class TestResult:
    """Outcome of a bootstrap test: observed statistic, p, mean and its CI."""

    statistic: float
    p_value: float
    mean: float
    ci_lo: float
    ci_hi: float
    resamples: int
    seed: int

    def as_record(self) -> dict:
        return {
            "statistic": self.statistic,
            "p": self.p_value,
            "mean": self.mean,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "B": self.resamples,
            "seed": self.seed,
        }


def pearson_r(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Product-moment correlation of two equal-length samples."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be equal-length 1-d sequences")
    if x.size < 2:
        raise ValueError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant input")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def mse(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Mean squared difference between paired samples."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be equal-length 1-d sequences")
    if x.size < 1:
        raise ValueError("need at least one observation")
    return float(np.mean((x - y) ** 2))


def _t_statistics(means: np.ndarray, sds: np.ndarray, n: int, mu0: float) -> np.ndarray:
    """t per resample; zero-variance resamples map 0/0 to 0 and keep +-inf."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (means - mu0) / (sds / math.sqrt(n))
    return np.where(np.isnan(t), 0.0, t)


def bootstrap_one_sample_t(
    values: Sequence[float], mu0: float = 0.0, B: int = 10_000, seed: int = 0
) -> TestResult:
    """Two-tailed bootstrap one-sample t-test of ``mean(values) == mu0``.

    Returns the observed t, the smoothed bootstrap p-value, and a 95%
    percentile confidence interval for the mean.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DegenerateSampleError("need at least two observations")
    if B < 1:
        raise ValueError("B must be >= 1")
    n = x.size
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise DegenerateSampleError("sample variance is zero")
    mean = float(x.mean())
    t_obs = (mean - mu0) / (sd / math.sqrt(n))

    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(B, n))
    draws = x[idx]
    means = draws.mean(axis=1)
    sds = draws.std(axis=1, ddof=1)
    # identical resample indices serve both the shifted null (for p) and
    # the raw data (for the CI): shifting moves every resample mean equally
    t_star = _t_statistics(means - (mean - mu0), sds, n, mu0)
    exceed = int(np.count_nonzero(np.abs(t_star) >= abs(t_obs)))
    p = (1 + exceed) / (B + 1)
    ci_lo, ci_hi = (float(v) for v in np.percentile(means, [2.5, 97.5]))
    return TestResult(
        statistic=float(t_obs),
        p_value=p,
        mean=mean,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        resamples=B,
        seed=seed,
    )


def bootstrap_paired_t(
    a: Sequence[float], b: Sequence[float], B: int = 10_000, seed: int = 0
) -> TestResult:
    """Bootstrap paired t-test: one-sample test of the differences against zero."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("paired samples must be equal-length 1-d sequences")
    return bootstrap_one_sample_t(x - y, mu0=0.0, B=B, seed=seed)


def bootstrap_ci_mean(
    values: Sequence[float], B: int = 10_000, seed: int = 0, level: float = 0.95
) -> tuple[float, float]:
    """Percentile bootstrap confidence interval for the mean."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DegenerateSampleError("need at least two observations")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, x.size, size=(B, x.size))
    means = x[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.percentile(means, [100 * alpha, 100 * (1 - alpha)])
    return float(lo), float(hi)
