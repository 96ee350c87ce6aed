"""Dependency-free SVG renderings of interval responses.

Two styles: a stack of horizontal bars (one per respondent, in input
order) and the step outline of an agreement function. Output is plain
SVG text with stable number formatting, so identical inputs produce
byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .agreement import AgreementFunction
from .intervals import Interval, ScaleSpec

_MARGIN_LEFT = 50.0
_MARGIN_RIGHT = 20.0
_MARGIN_TOP = 16.0
_MARGIN_BOTTOM = 36.0


@dataclass(frozen=True)
class PlotSpec:
    """Canvas geometry and style for a plot."""

    width: float = 640.0
    height: float = 360.0
    style: str = "interval_stack"  # or "iaa"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("plot dimensions must be positive")
        if self.style not in ("interval_stack", "iaa"):
            raise ValueError(f"unknown plot style '{self.style}'")


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


def _x_mapper(scale: ScaleSpec, spec: PlotSpec):
    inner = spec.width - _MARGIN_LEFT - _MARGIN_RIGHT

    def to_px(x: float) -> float:
        return _MARGIN_LEFT + inner * (x - scale.min) / scale.span

    return to_px


def _axis(scale: ScaleSpec, spec: PlotSpec, y: float) -> list[str]:
    to_px = _x_mapper(scale, spec)
    parts = [
        f'<line x1="{_fmt(to_px(scale.min))}" y1="{_fmt(y)}" '
        f'x2="{_fmt(to_px(scale.max))}" y2="{_fmt(y)}" stroke="black"/>'
    ]
    ticks = scale.tick_values or (scale.min, scale.max)
    for t in ticks:
        px = to_px(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(y)}" x2="{_fmt(px)}" y2="{_fmt(y + 5)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(y + 18)}" font-size="10" text-anchor="middle">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{_fmt(to_px(scale.min))}" y="{_fmt(y + 32)}" font-size="11" text-anchor="start">{scale.left_label}</text>'
    )
    parts.append(
        f'<text x="{_fmt(to_px(scale.max))}" y="{_fmt(y + 32)}" font-size="11" text-anchor="end">{scale.right_label}</text>'
    )
    return parts


def _document(spec: PlotSpec, body: Iterable[str]) -> str:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(spec.width)}" '
        f'height="{_fmt(spec.height)}" viewBox="0 0 {_fmt(spec.width)} {_fmt(spec.height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
        *body,
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def plot_intervals_svg(
    responses: Sequence[Interval], scale: ScaleSpec, spec: PlotSpec | None = None
) -> str:
    """Render one horizontal bar per interval, stacked in input order.

    Zero-width intervals are drawn as a short vertical tick at their
    position, so precise answers stay visible.
    """
    if not responses:
        raise ValueError("need at least one interval to plot")
    spec = spec or PlotSpec(style="interval_stack")
    to_px = _x_mapper(scale, spec)
    axis_y = spec.height - _MARGIN_BOTTOM
    inner_h = axis_y - _MARGIN_TOP
    row_h = inner_h / len(responses)
    bar = min(row_h * 0.6, 10.0)

    body = []
    for i, iv in enumerate(responses):
        y = _MARGIN_TOP + (i + 0.5) * row_h
        x1, x2 = to_px(iv.lo), to_px(iv.hi)
        if iv.width == 0:
            body.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y - bar / 2)}" x2="{_fmt(x1)}" '
                f'y2="{_fmt(y + bar / 2)}" stroke="steelblue" stroke-width="2"/>'
            )
        else:
            body.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y)}" x2="{_fmt(x2)}" y2="{_fmt(y)}" '
                f'stroke="steelblue" stroke-width="{_fmt(bar)}" stroke-linecap="butt"/>'
            )
    body.extend(_axis(scale, spec, axis_y))
    return _document(spec, body)


def plot_iaa_svg(
    af: AgreementFunction, scale: ScaleSpec, spec: PlotSpec | None = None
) -> str:
    """Render the step outline of an agreement function, y axis [0, 1].

    Regions of the scale outside the support draw as the zero baseline.
    """
    spec = spec or PlotSpec(style="iaa")
    to_px = _x_mapper(scale, spec)
    axis_y = spec.height - _MARGIN_BOTTOM
    inner_h = axis_y - _MARGIN_TOP

    def to_py(level: float) -> float:
        return axis_y - inner_h * level

    bps = af.breakpoints
    points: list[tuple[float, float]] = [(to_px(scale.min), to_py(0.0))]
    points.append((to_px(bps[0]), to_py(0.0)))
    for i, level in enumerate(af.segment_levels):
        points.append((to_px(bps[i]), to_py(level)))
        points.append((to_px(bps[i + 1]), to_py(level)))
    points.append((to_px(bps[-1]), to_py(0.0)))
    points.append((to_px(scale.max), to_py(0.0)))

    path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    body = [
        f'<polyline points="{path}" fill="none" stroke="darkorange" stroke-width="2"/>',
        # y-axis with 0..1 labels
        f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(_MARGIN_TOP)}" '
        f'x2="{_fmt(_MARGIN_LEFT)}" y2="{_fmt(axis_y)}" stroke="black"/>',
    ]
    for level in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = to_py(level)
        body.append(
            f'<line x1="{_fmt(_MARGIN_LEFT - 4)}" y1="{_fmt(y)}" x2="{_fmt(_MARGIN_LEFT)}" '
            f'y2="{_fmt(y)}" stroke="black"/>'
        )
        body.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8)}" y="{_fmt(y + 3)}" font-size="10" '
            f'text-anchor="end">{_fmt(level)}</text>'
        )
    body.extend(_axis(scale, spec, axis_y))
    return _document(spec, body)
