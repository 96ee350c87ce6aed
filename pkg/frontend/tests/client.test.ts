import { describe, expect, test } from "vitest";

import { SurveyClient } from "../src/client.js";
import type { SubmissionPayload } from "../src/types.js";

function payload(question: string): SubmissionPayload {
  return {
    respondent_id: "r1",
    question_id: question,
    stroke: {
      points: [
        [10, 5, 0],
        [30, 5, 16],
      ],
      canvas_to_scale: { x_offset: 0, x_gain: 1 },
    },
    interval_raw: { lo: 10, hi: 30 },
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("survey client", () => {
  test("accepted submission returns the stored record", async () => {
    const client = new SurveyClient("http://svc", async (url, init) => {
      expect(url).toBe("http://svc/response");
      expect(init?.method).toBe("POST");
      return jsonResponse(201, { stored: { question_id: "q1" } });
    });
    const outcome = await client.submit(payload("q1"));
    expect(outcome.kind).toBe("accepted");
    expect(client.pending).toBe(0);
  });

  test("server mismatch surfaces the recomputed interval", async () => {
    const client = new SurveyClient("http://svc", async () =>
      jsonResponse(409, {
        error: "client interval disagrees with server extraction",
        disagreement_normalized: 3.5,
        server_interval_raw: { lo: 11, hi: 29 },
        server_interval_norm: { lo: 27.5, hi: 72.5 },
      }),
    );
    const outcome = await client.submit(payload("q1"));
    expect(outcome.kind).toBe("mismatch");
    if (outcome.kind === "mismatch") {
      expect(outcome.diagnostic.server_interval_raw).toEqual({ lo: 11, hi: 29 });
    }
    expect(client.pending).toBe(0); // a definitive refusal is not retried
  });

  test("network failure queues and flush retries in order", async () => {
    let up = false;
    const delivered: string[] = [];
    const client = new SurveyClient("http://svc", async (_url, init) => {
      if (!up) throw new TypeError("network down");
      const body = JSON.parse(String(init?.body)) as SubmissionPayload;
      delivered.push(body.question_id);
      return jsonResponse(201, { stored: { question_id: body.question_id } });
    });

    expect((await client.submit(payload("q1"))).kind).toBe("queued");
    expect((await client.submit(payload("q2"))).kind).toBe("queued");
    expect(client.pending).toBe(2);

    up = true;
    const outcome = await client.flush();
    expect(outcome?.kind).toBe("accepted");
    expect(client.pending).toBe(0);
    expect(delivered).toEqual(["q1", "q2"]);
  });

  test("flush with an empty queue is a no-op", async () => {
    const client = new SurveyClient("http://svc", async () => jsonResponse(201, { stored: {} }));
    expect(await client.flush()).toBeNull();
  });

  test("rejection carries status and error text", async () => {
    const client = new SurveyClient("http://svc", async () =>
      jsonResponse(404, { error: "unknown question id 'zzz'" }),
    );
    const outcome = await client.submit(payload("zzz"));
    expect(outcome).toEqual({
      kind: "rejected",
      status: 404,
      error: "unknown question id 'zzz'",
    });
  });
});
