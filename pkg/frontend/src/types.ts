/** Wire types shared with the collection service. */

export interface ScaleDoc {
  min: number;
  max: number;
  left_label: string;
  right_label: string;
  ticks: number[];
}

export interface QuestionDoc {
  id: string;
  text: string;
  section: string;
  scale: ScaleDoc;
  stimulus_ref: string | null;
}

export interface SurveyDoc {
  survey_id: string;
  title: string;
  questions: QuestionDoc[];
}

/** Affine map from canvas x (CSS pixels) to scale units: offset + gain * x. */
export interface CanvasToScale {
  x_offset: number;
  x_gain: number;
}

export type StrokePoint = [x: number, y: number, tMs: number];

export interface StrokeDoc {
  points: StrokePoint[];
  canvas_to_scale: CanvasToScale;
}

export interface IntervalDoc {
  lo: number;
  hi: number;
}

export interface SubmissionPayload {
  respondent_id: string;
  question_id: string;
  stroke: StrokeDoc;
  /** Client-side extraction; advisory only, the server recomputes. */
  interval_raw: IntervalDoc;
}

export interface StoredResponse {
  respondent_id: string;
  question_id: string;
  interval_raw: IntervalDoc;
  interval_norm: IntervalDoc;
  submitted_at: string;
}

export interface MismatchDiagnostic {
  error: string;
  disagreement_normalized: number;
  server_interval_raw: IntervalDoc;
  server_interval_norm: IntervalDoc;
}

export type SubmitOutcome =
  | { kind: "accepted"; stored: StoredResponse }
  | { kind: "mismatch"; diagnostic: MismatchDiagnostic }
  | { kind: "rejected"; status: number; error: string }
  | { kind: "queued" };
