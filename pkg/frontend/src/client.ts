/**
 * HTTP client for the workshop service: fetches the survey definition and
 * submits drawn responses. A failed network call never loses the payload;
 * it stays in an in-memory queue that is flushed in order on the next
 * attempt, and duplicate delivery is harmless because the server keeps
 * the latest record per (respondent, question).
 */

import type {
  MismatchDiagnostic,
  StoredResponse,
  SubmissionPayload,
  SubmitOutcome,
  SurveyDoc,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SurveyClient {
  private queue: SubmissionPayload[] = [];

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  get pending(): number {
    return this.queue.length;
  }

  async fetchSurvey(): Promise<SurveyDoc> {
    const response = await this.fetchImpl(`${this.baseUrl}/survey`);
    if (!response.ok) {
      throw new Error(`survey fetch failed: HTTP ${response.status}`);
    }
    return (await response.json()) as SurveyDoc;
  }

  private async post(payload: SubmissionPayload): Promise<SubmitOutcome> {
    const response = await this.fetchImpl(`${this.baseUrl}/response`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (response.status === 201) {
      const body = (await response.json()) as { stored: StoredResponse };
      return { kind: "accepted", stored: body.stored };
    }
    if (response.status === 409) {
      const diagnostic = (await response.json()) as MismatchDiagnostic;
      return { kind: "mismatch", diagnostic };
    }
    const body = (await response.json().catch(() => ({ error: "unreadable" }))) as {
      error?: string;
    };
    return { kind: "rejected", status: response.status, error: body.error ?? "unknown" };
  }

  /**
   * Submit one response; on network failure the payload is queued and the
   * outcome is "queued". Earlier queued payloads are flushed first so
   * arrival order stays submission order.
   */
  async submit(payload: SubmissionPayload): Promise<SubmitOutcome> {
    this.queue.push(payload);
    return this.flushTail();
  }

  /** Retry everything still queued; returns the outcome of the last payload. */
  async flush(): Promise<SubmitOutcome | null> {
    if (this.queue.length === 0) return null;
    return this.flushTail();
  }

  private async flushTail(): Promise<SubmitOutcome> {
    let last: SubmitOutcome = { kind: "queued" };
    while (this.queue.length > 0) {
      const head = this.queue[0];
      try {
        last = await this.post(head);
      } catch {
        return { kind: "queued" }; // network down: keep head and everything after
      }
      this.queue.shift();
    }
    return last;
  }
}
