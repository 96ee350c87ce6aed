/**
 * Pointer-stream capture: accumulates one stroke per question from
 * pointerdown to pointerup. Drawing again replaces the previous stroke;
 * a gesture shorter than two points is discarded.
 *
 * The recorder is DOM-free (it consumes plain coordinate samples), so the
 * capture logic is unit-testable with scripted gestures; the widget layer
 * feeds it real PointerEvents.
 */

import type { StrokePoint } from "./types.js";

export interface PointerSample {
  x: number;
  y: number;
  timeStamp: number;
}

export type StrokeListener = (points: readonly StrokePoint[] | null) => void;

export class StrokeRecorder {
  private current: StrokePoint[] = [];
  private committed: StrokePoint[] | null = null;
  private drawing = false;
  private startMs = 0;
  private listeners: StrokeListener[] = [];

  onChange(listener: StrokeListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.committed);
  }

  get stroke(): readonly StrokePoint[] | null {
    return this.committed;
  }

  get isDrawing(): boolean {
    return this.drawing;
  }

  pointerDown(sample: PointerSample): void {
    this.drawing = true;
    this.startMs = sample.timeStamp;
    this.current = [[sample.x, sample.y, 0]];
  }

  pointerMove(sample: PointerSample): void {
    if (!this.drawing) return;
    this.current.push([sample.x, sample.y, Math.round(sample.timeStamp - this.startMs)]);
  }

  /** Ends the gesture; returns the committed stroke or null if discarded. */
  pointerUp(sample?: PointerSample): readonly StrokePoint[] | null {
    if (!this.drawing) return this.committed;
    if (sample) {
      this.current.push([sample.x, sample.y, Math.round(sample.timeStamp - this.startMs)]);
    }
    this.drawing = false;
    if (this.current.length < 2) {
      // too short to mean anything; keep whatever was drawn before
      this.current = [];
      this.emit();
      return this.committed;
    }
    this.committed = this.current; // redraw replaces the previous stroke
    this.current = [];
    this.emit();
    return this.committed;
  }

  clear(): void {
    this.committed = null;
    this.current = [];
    this.drawing = false;
    this.emit();
  }
}

/** Scripted elliptical gesture, for tests and demos. */
export function ellipseGesture(
  centerX: number,
  centerY: number,
  radiusX: number,
  radiusY: number,
  samples = 32,
): PointerSample[] {
  const out: PointerSample[] = [];
  for (let i = 0; i <= samples; i++) {
    const angle = (2 * Math.PI * i) / samples;
    out.push({
      x: centerX + radiusX * Math.cos(angle),
      y: centerY + radiusY * Math.sin(angle),
      timeStamp: 16 * i,
    });
  }
  return out;
}

/** Scripted vertical-line gesture (a completely precise answer). */
export function verticalLineGesture(x: number, yTop: number, yBottom: number): PointerSample[] {
  return [
    { x, y: yTop, timeStamp: 0 },
    { x, y: (yTop + yBottom) / 2, timeStamp: 16 },
    { x, y: yBottom, timeStamp: 32 },
  ];
}

export function replayGesture(recorder: StrokeRecorder, samples: PointerSample[]): void {
  if (samples.length === 0) return;
  recorder.pointerDown(samples[0]);
  for (const sample of samples.slice(1, -1)) recorder.pointerMove(sample);
  recorder.pointerUp(samples.length > 1 ? samples[samples.length - 1] : undefined);
}
