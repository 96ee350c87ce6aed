import { describe, expect, test } from "vitest";

import {
  StrokeRecorder,
  ellipseGesture,
  replayGesture,
  verticalLineGesture,
} from "../src/stroke.js";

describe("stroke recorder", () => {
  test("accumulates points from down to up", () => {
    const recorder = new StrokeRecorder();
    recorder.pointerDown({ x: 10, y: 5, timeStamp: 100 });
    recorder.pointerMove({ x: 12, y: 6, timeStamp: 116 });
    recorder.pointerMove({ x: 15, y: 8, timeStamp: 132 });
    const stroke = recorder.pointerUp({ x: 16, y: 9, timeStamp: 148 });
    expect(stroke).not.toBeNull();
    expect(stroke!.length).toBe(4);
    expect(stroke![0]).toEqual([10, 5, 0]);
    expect(stroke![3]).toEqual([16, 9, 48]); // relative milliseconds
  });

  test("redraw replaces the previous stroke", () => {
    const recorder = new StrokeRecorder();
    replayGesture(recorder, ellipseGesture(100, 50, 30, 10));
    const first = recorder.stroke;
    replayGesture(recorder, ellipseGesture(300, 50, 20, 8));
    const second = recorder.stroke;
    expect(first).not.toBeNull();
    expect(second).not.toBeNull();
    expect(second).not.toBe(first);
    const xs = second!.map(([x]) => x);
    expect(Math.min(...xs)).toBeCloseTo(280, 6);
  });

  test("single-point gesture is discarded, previous stroke kept", () => {
    const recorder = new StrokeRecorder();
    replayGesture(recorder, ellipseGesture(100, 50, 30, 10));
    const before = recorder.stroke;
    recorder.pointerDown({ x: 5, y: 5, timeStamp: 0 });
    const after = recorder.pointerUp(); // no movement at all
    expect(after).toBe(before);
  });

  test("moves are ignored while not drawing", () => {
    const recorder = new StrokeRecorder();
    recorder.pointerMove({ x: 1, y: 1, timeStamp: 0 });
    expect(recorder.stroke).toBeNull();
  });

  test("change listener fires on commit and clear", () => {
    const recorder = new StrokeRecorder();
    const seen: (number | null)[] = [];
    recorder.onChange((points) => seen.push(points === null ? null : points.length));
    replayGesture(recorder, verticalLineGesture(42, 10, 90));
    recorder.clear();
    expect(seen).toEqual([3, null]);
  });

  test("scripted gestures have the advertised shape", () => {
    const ellipse = ellipseGesture(200, 60, 50, 15, 16);
    const xs = ellipse.map((p) => p.x);
    expect(Math.max(...xs)).toBeCloseTo(250, 6);
    expect(Math.min(...xs)).toBeCloseTo(150, 6);
    const line = verticalLineGesture(77, 0, 100);
    expect(new Set(line.map((p) => p.x)).size).toBe(1);
  });
});
