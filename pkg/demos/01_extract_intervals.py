"""Reducing drawn strokes to interval responses.

A respondent answers by circling part of a continuous scale (or drawing a
vertical line for a precise answer). The response interval is simply the
x-extent of the stroke in scale units, clamped to the scale bounds.
"""

import math

from ivsurvey import CanvasMap, ScaleSpec, Stroke, extract_interval, normalize, summarize

scale = ScaleSpec(0.0, 40.0, left_label="0 years", right_label="40 years")

# An elliptical gesture around 15..20 on the scale. Canvas pixels 80..880
# map onto the scale: value = -4 + 0.05 * pixel_x.
canvas = CanvasMap(x_offset=-4.0, x_gain=0.05)
angles = [2 * math.pi * i / 24 for i in range(25)]
points = tuple(
    (430.0 + 50.0 * math.cos(a), 60.0 + 12.0 * math.sin(a), 16 * i)
    for i, a in enumerate(angles)
)
ellipse = Stroke(points=points, canvas_to_scale=canvas)

interval = extract_interval(ellipse, scale)
print("ellipse        ->", interval)
print("summary        ->", summarize(interval))
print("normalized     ->", normalize(interval, scale))

# Circling past the scale ends means "the whole range": points clamp, they
# are never rejected.
overshoot = Stroke(
    points=((-120.0, 55.0, 0), (1000.0, 60.0, 350)),
    canvas_to_scale=canvas,
)
print("overshoot      ->", extract_interval(overshoot, scale))

# A single vertical line is a completely precise answer: width zero.
vertical = Stroke(
    points=((430.0, 30.0, 0), (430.0, 90.0, 200)),
    canvas_to_scale=canvas,
)
print("vertical line  ->", extract_interval(vertical, scale))
