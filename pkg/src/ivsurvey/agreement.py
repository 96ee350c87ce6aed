"""Aggregation of interval collections into a group agreement function.

The agreement function of N intervals assigns to every x the fraction of
intervals that cover x (closed-interval semantics: endpoints count). It
is piecewise constant with breakpoints exactly at the interval endpoints,
and can be read as a fuzzy membership function over the response scale.

Queries are answered exactly, by counting with binary search over the
sorted endpoint arrays rather than by sampling, so membership at interval
endpoints (including zero-width intervals, which contribute a single
point of agreement) is never smeared.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from math import floor
from typing import Iterable, Sequence

import numpy as np

from .intervals import Interval


class EmptyAggregateError(ValueError):
    """Raised when asked to aggregate zero intervals."""


class AgreementFunction:
    """Piecewise-constant overlap proportion built from a set of intervals.

    Attributes
    ----------
    n : int
        Number of contributing intervals; every level is a multiple of 1/n.
    breakpoints : tuple of float
        Sorted distinct interval endpoints. The function is zero outside
        ``[breakpoints[0], breakpoints[-1]]``.
    segment_levels : tuple of float
        Membership on each open segment ``(breakpoints[i], breakpoints[i+1])``.
    point_levels : tuple of float
        Membership exactly at each breakpoint (>= the adjacent segment
        levels, because intervals are closed).
    """

    def __init__(self, intervals: Iterable[Interval]):
        ivs = list(intervals)
        if not ivs:
            raise EmptyAggregateError("cannot build an agreement function from zero intervals")
        self.n = len(ivs)
        self._los = sorted(iv.lo for iv in ivs)
        self._his = sorted(iv.hi for iv in ivs)
        bps = sorted(set(self._los) | set(self._his))
        self.breakpoints = tuple(bps)
        self.point_levels = tuple(self._count_at(b) / self.n for b in bps)
        # An interval either covers a whole open segment or misses it
        # entirely (all endpoints are breakpoints), so the level just right
        # of the left breakpoint is the segment level.
        self.segment_levels = tuple(
            (bisect_right(self._los, b) - bisect_right(self._his, b)) / self.n for b in bps[:-1]
        )

    def _count_at(self, x: float) -> int:
        # number of intervals with lo <= x minus number with hi < x
        return bisect_right(self._los, x) - bisect_left(self._his, x)

    def membership(self, x: float) -> float:
        """Exact agreement proportion at x, in [0, 1]."""
        return self._count_at(x) / self.n

    def membership_many(self, xs: Sequence[float]) -> np.ndarray:
        """Vectorized :meth:`membership` with identical semantics."""
        x = np.asarray(xs, dtype=float)
        lo_counts = np.searchsorted(self._los, x, side="right")
        hi_counts = np.searchsorted(self._his, x, side="left")
        return (lo_counts - hi_counts) / self.n

    @property
    def support(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def max_membership(self) -> float:
        return max(max(self.point_levels), max(self.segment_levels, default=0.0))

    def integral(self) -> float:
        """Area under the function: sum of segment level x segment length.

        Point masses at breakpoints have zero measure; the result equals
        the mean interval width.
        """
        bps = self.breakpoints
        return sum(
            lvl * (bps[i + 1] - bps[i]) for i, lvl in enumerate(self.segment_levels)
        )

    def discretize(
        self, step: float, start: float | None = None, stop: float | None = None
    ) -> list[tuple[float, float]]:
        """Sample (x, membership) on a regular grid.

        The grid runs from ``start`` (default: first breakpoint) in
        increments of ``step`` up to and including ``stop`` (default: last
        breakpoint). Each sample is the exact membership at that x.
        """
        if step <= 0:
            raise ValueError(f"step must be positive, got {step}")
        lo = self.breakpoints[0] if start is None else start
        hi = self.breakpoints[-1] if stop is None else stop
        count = int(floor((hi - lo) / step + 1e-9)) + 1
        xs = [lo + i * step for i in range(max(count, 1))]
        return [(x, self.membership(x)) for x in xs]


def build_agreement(intervals: Iterable[Interval]) -> AgreementFunction:
    """Aggregate intervals into their agreement function.

    For every x the value is ``|{i : lo_i <= x <= hi_i}| / N``; the order
    of the input does not matter.
    """
    return AgreementFunction(intervals)


def membership(af: AgreementFunction, x: float) -> float:
    """Agreement proportion of ``af`` at ``x`` (closed-interval semantics)."""
    return af.membership(x)


def round_half_away(x: float) -> float:
    """Round to the nearest integer, ties away from zero."""
    return floor(abs(x) + 0.5) * (1.0 if x >= 0 else -1.0)


def round_to_integers(intervals: Iterable[Interval]) -> list[Interval]:
    """Round every endpoint to the nearest response integer.

    Used to reproduce agreement plots on integer-valued scales; ties round
    away from zero, and endpoint order is preserved since the rounding is
    monotone.
    """
    return [Interval(round_half_away(iv.lo), round_half_away(iv.hi)) for iv in intervals]


def discretize(
    af: AgreementFunction, step: float, start: float | None = None, stop: float | None = None
) -> list[tuple[float, float]]:
    """Module-level alias of :meth:`AgreementFunction.discretize`."""
    return af.discretize(step, start=start, stop=stop)
