export * from "./types.js";
export { canvasMapForAxis, clamp, extractInterval, normalizeInterval, toScaleUnits } from "./extraction.js";
export { StrokeRecorder, ellipseGesture, replayGesture, verticalLineGesture } from "./stroke.js";
export type { PointerSample, StrokeListener } from "./stroke.js";
export { SurveyClient } from "./client.js";
export type { FetchLike } from "./client.js";
export { CanvasQuestionView } from "./widget.js";
export type { WidgetOptions } from "./widget.js";
