/**
 * Canvas question view: renders one question's continuous scale, lets the
 * respondent circle an area (or draw a vertical line), previews the
 * extracted interval before submission, and submits the raw stroke.
 *
 * The y-extent of the drawing is rendered faithfully but ignored by
 * extraction; only the x-extent carries meaning. There is no way to
 * submit without drawing.
 */

import { SurveyClient } from "./client.js";
import { canvasMapForAxis, extractInterval, normalizeInterval } from "./extraction.js";
import { StrokeRecorder } from "./stroke.js";
import type { IntervalDoc, QuestionDoc, SubmitOutcome } from "./types.js";

export interface WidgetOptions {
  respondentId: string;
  /** Called when the server's recomputed interval disagrees with the
   * preview; return true to accept the server's version and resubmit. */
  onMismatch?: (serverInterval: IntervalDoc) => boolean;
  onAccepted?: (questionId: string) => void;
}

const AXIS_INSET = 40; // px from each canvas edge to the scale ends

export class CanvasQuestionView {
  readonly recorder = new StrokeRecorder();
  private readonly context: CanvasRenderingContext2D;
  private preview: IntervalDoc | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly question: QuestionDoc,
    private readonly client: SurveyClient,
    private readonly options: WidgetOptions,
  ) {
    const context = canvas.getContext("2d");
    if (!context) throw new Error("2d canvas context unavailable");
    this.context = context;
    this.bindPointerEvents();
    this.redraw();
  }

  static mount(
    root: HTMLElement,
    question: QuestionDoc,
    client: SurveyClient,
    options: WidgetOptions,
  ): CanvasQuestionView {
    root.innerHTML = "";
    const text = document.createElement("p");
    text.textContent = question.text;
    text.className = "ivsurvey-question-text";
    root.appendChild(text);

    const canvas = document.createElement("canvas");
    canvas.width = 640;
    canvas.height = 160;
    canvas.className = "ivsurvey-canvas";
    canvas.style.touchAction = "none"; // let the stylus draw, not scroll
    root.appendChild(canvas);
    return new CanvasQuestionView(canvas, question, client, options);
  }

  private axisPixels(): { left: number; right: number; y: number } {
    return { left: AXIS_INSET, right: this.canvas.width - AXIS_INSET, y: this.canvas.height - 40 };
  }

  canvasMap() {
    const axis = this.axisPixels();
    return canvasMapForAxis(axis.left, axis.right, this.question.scale);
  }

  get previewInterval(): IntervalDoc | null {
    return this.preview;
  }

  get canSubmit(): boolean {
    return this.preview !== null;
  }

  private bindPointerEvents(): void {
    const local = (event: PointerEvent) => {
      const rect = this.canvas.getBoundingClientRect();
      return {
        x: ((event.clientX - rect.left) / rect.width) * this.canvas.width,
        y: ((event.clientY - rect.top) / rect.height) * this.canvas.height,
        timeStamp: event.timeStamp,
      };
    };
    this.canvas.addEventListener("pointerdown", (e) => {
      this.canvas.setPointerCapture(e.pointerId);
      this.recorder.pointerDown(local(e));
      this.redraw();
    });
    this.canvas.addEventListener("pointermove", (e) => {
      this.recorder.pointerMove(local(e));
      if (this.recorder.isDrawing) this.redraw();
    });
    this.canvas.addEventListener("pointerup", (e) => {
      this.recorder.pointerUp(local(e));
      this.refreshPreview();
      this.redraw();
    });
  }

  private refreshPreview(): void {
    const stroke = this.recorder.stroke;
    this.preview =
      stroke === null ? null : extractInterval(stroke, this.canvasMap(), this.question.scale);
  }

  /** Redraw scale, stroke, and preview markers. */
  private redraw(): void {
    const ctx = this.context;
    const { left, right, y } = this.axisPixels();
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);

    ctx.strokeStyle = "#222";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(left, y);
    ctx.lineTo(right, y);
    ctx.stroke();
    ctx.font = "12px sans-serif";
    ctx.fillStyle = "#222";
    ctx.textAlign = "left";
    ctx.fillText(this.question.scale.left_label, left, y + 24);
    ctx.textAlign = "right";
    ctx.fillText(this.question.scale.right_label, right, y + 24);
    for (const tick of this.question.scale.ticks) {
      const frac =
        (tick - this.question.scale.min) / (this.question.scale.max - this.question.scale.min);
      const x = left + frac * (right - left);
      ctx.beginPath();
      ctx.moveTo(x, y);
      ctx.lineTo(x, y + 6);
      ctx.stroke();
    }

    const stroke = this.recorder.stroke;
    if (stroke) {
      ctx.strokeStyle = "#1f77b4";
      ctx.lineWidth = 2;
      ctx.beginPath();
      stroke.forEach(([x, sy], i) => (i === 0 ? ctx.moveTo(x, sy) : ctx.lineTo(x, sy)));
      ctx.stroke();
    }

    if (this.preview) {
      const map = this.canvasMap();
      ctx.strokeStyle = "#2a6fbb";
      ctx.setLineDash([6, 4]);
      for (const value of [this.preview.lo, this.preview.hi]) {
        const x = (value - map.x_offset) / map.x_gain;
        ctx.beginPath();
        ctx.moveTo(x, 16);
        ctx.lineTo(x, y);
        ctx.stroke();
      }
      ctx.setLineDash([]);
    }
  }

  /** Submit the current stroke; resolves once acknowledged or queued. */
  async submit(): Promise<SubmitOutcome> {
    const stroke = this.recorder.stroke;
    if (!stroke || !this.preview) {
      return { kind: "rejected", status: 0, error: "draw a response first" };
    }
    const payload = {
      respondent_id: this.options.respondentId,
      question_id: this.question.id,
      stroke: { points: [...stroke], canvas_to_scale: this.canvasMap() },
      interval_raw: this.preview,
    };
    let outcome = await this.client.submit(payload);
    if (outcome.kind === "mismatch" && this.options.onMismatch) {
      const serverInterval = outcome.diagnostic.server_interval_raw;
      if (this.options.onMismatch(serverInterval)) {
        outcome = await this.client.submit({ ...payload, interval_raw: serverInterval });
      }
    }
    if (outcome.kind === "accepted") {
      this.options.onAccepted?.(this.question.id);
    }
    return outcome;
  }

  /** Normalized preview, for display next to the drawing. */
  normalizedPreview(): IntervalDoc | null {
    return this.preview ? normalizeInterval(this.preview, this.question.scale) : null;
  }
}
