"""Closed intervals on bounded response scales, and their extraction from drawn strokes.

An interval-valued response is a closed range ``[lo, hi]`` on a question's
scale. When a respondent circles part of the scale (or draws a vertical
line for a precise answer), the stroke reduces to an interval by taking
the x-extent of its sampled points, mapped to scale units and clamped to
the scale bounds. The y-extent of the stroke carries no meaning and is
ignored.

All values here are immutable and all operations are pure functions, so
they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass


class ScaleError(ValueError):
    """Unusable scale or canvas-map configuration (e.g. zero gain, max <= min)."""


class MalformedStrokeError(ValueError):
    """A stroke that cannot yield an interval (fewer than two sampled points)."""


@dataclass(frozen=True)
class ScaleSpec:
    """A bounded continuous response scale with end labels and optional ticks."""

    min: float
    max: float
    left_label: str = ""
    right_label: str = ""
    tick_values: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tick_values", tuple(float(t) for t in self.tick_values))
        if not self.max > self.min:
            raise ScaleError(f"scale max ({self.max}) must exceed min ({self.min})")
        for t in self.tick_values:
            if not (self.min <= t <= self.max):
                raise ScaleError(f"tick {t} outside scale [{self.min}, {self.max}]")

    @property
    def span(self) -> float:
        return self.max - self.min

    def clamp(self, x: float) -> float:
        return min(max(x, self.min), self.max)

    def contains(self, interval: "Interval") -> bool:
        return self.min <= interval.lo and interval.hi <= self.max


@dataclass(frozen=True, order=True)
class Interval:
    """A closed interval [lo, hi]; the atomic survey response."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval endpoints out of order: lo={self.lo} > hi={self.hi}")

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2.0

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class IntervalSummary:
    """The two derived response variables: position (midpoint) and width."""

    midpoint: float
    width: float


@dataclass(frozen=True)
class CanvasMap:
    """Affine map from canvas x coordinates to scale units: offset + gain * x."""

    x_offset: float
    x_gain: float

    def __post_init__(self):
        if self.x_gain == 0:
            raise ScaleError("canvas map gain must be nonzero")

    def to_scale(self, x: float) -> float:
        return self.x_offset + self.x_gain * x


@dataclass(frozen=True)
class Stroke:
    """A digitized drawing gesture: ordered (x, y, t_ms) samples plus a canvas map.

    The time stamps are retained for completeness but no analysis consumes
    them.
    """

    points: tuple[tuple[float, float, int], ...]
    canvas_to_scale: CanvasMap

    def __post_init__(self):
        pts = tuple((float(x), float(y), int(t)) for x, y, t in self.points)
        if len(pts) < 2:
            raise MalformedStrokeError(f"stroke needs >= 2 points, got {len(pts)}")
        object.__setattr__(self, "points", pts)

    def scale_xs(self) -> list[float]:
        m = self.canvas_to_scale
        return [m.to_scale(x) for x, _, _ in self.points]


def extract_interval(stroke: Stroke, scale: ScaleSpec) -> Interval:
    """Reduce a stroke to its response interval.

    The interval is the x-extent of the stroke in scale units, clamped to
    the scale bounds. Overshooting points are kept (clamped), since
    circling past the scale ends is a deliberate "whole scale" gesture; a
    vertical-line stroke yields a zero-width interval.
    """
    xs = stroke.scale_xs()
    return Interval(scale.clamp(min(xs)), scale.clamp(max(xs)))


def summarize(interval: Interval) -> IntervalSummary:
    """Split an interval into its midpoint (mean of endpoints) and width."""
    return IntervalSummary(midpoint=interval.midpoint, width=interval.width)


def normalize(interval: Interval, scale: ScaleSpec) -> Interval:
    """Map an interval onto the standardized [0, 100] response scale.

    Both endpoints transform affinely: ``100 * (x - min) / (max - min)``.
    The interval must lie within the scale.
    """
    if not scale.contains(interval):
        raise ValueError(
            f"interval [{interval.lo}, {interval.hi}] outside scale [{scale.min}, {scale.max}]"
        )
    span = scale.span
    return Interval(
        100.0 * (interval.lo - scale.min) / span,
        100.0 * (interval.hi - scale.min) / span,
    )
