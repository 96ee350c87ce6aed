/**
 * Client-side mirror of the server's stroke-to-interval extraction: take
 * the x-extent of the stroke in scale units and clamp it to the scale
 * bounds. The preview computed here must agree with the server's own
 * extraction to within 0.5 normalized units or the submission is refused,
 * so this intentionally duplicates the rule rather than approximating it.
 */

import type { CanvasToScale, IntervalDoc, ScaleDoc, StrokePoint } from "./types.js";

export function toScaleUnits(x: number, map: CanvasToScale): number {
  return map.x_offset + map.x_gain * x;
}

export function clamp(x: number, lo: number, hi: number): number {
  return Math.min(Math.max(x, lo), hi);
}

/** Bounding x-extent of the stroke, clamped to the scale. */
export function extractInterval(
  points: readonly StrokePoint[],
  map: CanvasToScale,
  scale: Pick<ScaleDoc, "min" | "max">,
): IntervalDoc {
  if (points.length < 2) {
    throw new Error(`stroke needs >= 2 points, got ${points.length}`);
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const [x] of points) {
    const v = toScaleUnits(x, map);
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {
    lo: clamp(lo, scale.min, scale.max),
    hi: clamp(hi, scale.min, scale.max),
  };
}

/** Affine map of an interval onto the standardized [0, 100] scale. */
export function normalizeInterval(
  interval: IntervalDoc,
  scale: Pick<ScaleDoc, "min" | "max">,
): IntervalDoc {
  const span = scale.max - scale.min;
  return {
    lo: (100 * (interval.lo - scale.min)) / span,
    hi: (100 * (interval.hi - scale.min)) / span,
  };
}

/**
 * The geometry of a rendered scale axis: canvas pixel positions of its two
 * ends. Yields the canvas-to-scale map sent along with every stroke, so
 * the server reconstructs intervals from the same mapping the respondent
 * saw.
 */
export function canvasMapForAxis(
  axisLeftPx: number,
  axisRightPx: number,
  scale: Pick<ScaleDoc, "min" | "max">,
): CanvasToScale {
  if (axisRightPx === axisLeftPx) {
    throw new Error("axis endpoints must differ");
  }
  const gain = (scale.max - scale.min) / (axisRightPx - axisLeftPx);
  return { x_offset: scale.min - gain * axisLeftPx, x_gain: gain };
}
