/**
 * Live round trip against the collection service: scripted pointer
 * gestures go through the real capture pipeline (recorder -> extraction ->
 * payload -> HTTP) and the stored intervals come back via the admin
 * export. Requires the Python package to be installed; skipped otherwise.
 */

import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { spawn, spawnSync } from "node:child_process";
import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { canvasMapForAxis, extractInterval, normalizeInterval } from "../src/extraction.js";
import { StrokeRecorder, ellipseGesture, replayGesture, verticalLineGesture } from "../src/stroke.js";
import { SurveyClient } from "../src/client.js";
import type { QuestionDoc, StrokePoint } from "../src/types.js";

const ADMIN_TOKEN = "frontend-roundtrip-token";

const pythonAvailable =
  spawnSync("python3", ["-c", "import ivsurvey"], { timeout: 30_000 }).status === 0;

let serverProc: ReturnType<typeof spawn> | null = null;
let baseUrl = "";

async function startServer(): Promise<void> {
  const dir = mkdtempSync(join(tmpdir(), "ivsurvey-frontend-"));
  const surveyPath = join(dir, "survey.json");
  const snippet = [
    "import json, sys",
    "from ivsurvey.fixtures import demo_survey",
    'json.dump(demo_survey().to_document(), open(sys.argv[1], "w"))',
  ].join("\n");
  const makeSurvey = spawnSync("python3", ["-c", snippet, surveyPath], { timeout: 60_000 });
  if (makeSurvey.status !== 0) {
    throw new Error(`survey fixture generation failed: ${makeSurvey.stderr}`);
  }

  serverProc = spawn(
    "python3",
    ["-m", "ivsurvey.cli", "serve", "--survey", surveyPath, "--out", join(dir, "log.jsonl"), "--port", "0"],
    { env: { ...process.env, IVSURVEY_ADMIN_TOKEN: ADMIN_TOKEN } },
  );
  baseUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server did not start")), 30_000);
    let buffer = "";
    serverProc!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/on (http:\/\/127\.0\.0\.1:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    serverProc!.on("error", reject);
    serverProc!.on("exit", (code) => reject(new Error(`server exited early (${code})`)));
  });
}

interface ExportedRecord {
  respondent_id: string;
  question_id: string;
  interval_norm: { lo: number; hi: number };
}

async function fetchExport(): Promise<ExportedRecord[]> {
  const response = await fetch(`${baseUrl}/responses`, {
    headers: { Authorization: `Bearer ${ADMIN_TOKEN}` },
  });
  expect(response.status).toBe(200);
  const text = await response.text();
  return text
    .trim()
    .split("\n")
    .filter((line) => line.length > 0)
    .map((line) => JSON.parse(line) as ExportedRecord);
}

function capture(gesture: ReturnType<typeof ellipseGesture>): readonly StrokePoint[] {
  const recorder = new StrokeRecorder();
  replayGesture(recorder, gesture);
  const stroke = recorder.stroke;
  expect(stroke).not.toBeNull();
  return stroke!;
}

describe.skipIf(!pythonAvailable)("capture round trip against the live service", () => {
  beforeAll(async () => {
    await startServer();
  }, 60_000);

  afterAll(() => {
    serverProc?.kill();
  });

  test("scripted ellipses store within 0.5 normalized units of intent", async () => {
    const client = new SurveyClient(baseUrl);
    const survey = await client.fetchSurvey();
    expect(survey.questions.length).toBe(63);
    const question = survey.questions.find((q) => q.id === "animal_royal_python")!;

    // canvas axis: pixels 40..600 represent the scale
    const map = canvasMapForAxis(40, 600, question.scale);
    // intend [20, 30] on the 0..40 scale: center pixel for 25, radius for 5
    const centerPx = (25 - map.x_offset) / map.x_gain;
    const radiusPx = 5 / map.x_gain;
    const stroke = capture(ellipseGesture(centerPx, 70, radiusPx, 18));
    const preview = extractInterval(stroke, map, question.scale);
    const intended = normalizeInterval({ lo: 20, hi: 30 }, question.scale);

    const outcome = await client.submit({
      respondent_id: "tsr1",
      question_id: question.id,
      stroke: { points: [...stroke], canvas_to_scale: map },
      interval_raw: preview,
    });
    expect(outcome.kind).toBe("accepted");

    const records = await fetchExport();
    const stored = records.find((r) => r.question_id === question.id)!;
    expect(Math.abs(stored.interval_norm.lo - intended.lo)).toBeLessThanOrEqual(0.5);
    expect(Math.abs(stored.interval_norm.hi - intended.hi)).toBeLessThanOrEqual(0.5);
  }, 30_000);

  test("circling the entire scale stores exactly [0, 100]", async () => {
    const client = new SurveyClient(baseUrl);
    const survey = await client.fetchSurvey();
    const question = survey.questions.find((q) => q.id === "animal_cat")!;
    const map = canvasMapForAxis(40, 600, question.scale);

    // a sweeping ellipse that overshoots both scale ends
    const stroke = capture(ellipseGesture(320, 70, 340, 25));
    const preview = extractInterval(stroke, map, question.scale);
    const outcome = await client.submit({
      respondent_id: "tsr2",
      question_id: question.id,
      stroke: { points: [...stroke], canvas_to_scale: map },
      interval_raw: preview,
    });
    expect(outcome.kind).toBe("accepted");

    const records = await fetchExport();
    const stored = records.find((r) => r.respondent_id === "tsr2")!;
    expect(stored.interval_norm).toEqual({ lo: 0, hi: 100 });
  }, 30_000);

  test("a vertical line stores a width of at most 0.5 normalized units", async () => {
    const client = new SurveyClient(baseUrl);
    const survey = await client.fetchSurvey();
    const question = survey.questions.find((q) => q.id === "temp_july")!;
    const map = canvasMapForAxis(40, 600, question.scale);

    const pixelFor18C = (18 - map.x_offset) / map.x_gain;
    const stroke = capture(verticalLineGesture(pixelFor18C, 30, 100));
    const preview = extractInterval(stroke, map, question.scale);
    const outcome = await client.submit({
      respondent_id: "tsr3",
      question_id: question.id,
      stroke: { points: [...stroke], canvas_to_scale: map },
      interval_raw: preview,
    });
    expect(outcome.kind).toBe("accepted");

    const records = await fetchExport();
    const stored = records.find((r) => r.respondent_id === "tsr3")!;
    expect(stored.interval_norm.hi - stored.interval_norm.lo).toBeLessThanOrEqual(0.5);
  }, 30_000);

  test("an inconsistent client claim is refused with the recomputed interval", async () => {
    const client = new SurveyClient(baseUrl);
    const survey = await client.fetchSurvey();
    const question = survey.questions.find((q) => q.id === "animal_rabbit")!;
    const map = canvasMapForAxis(40, 600, question.scale);
    const stroke = capture(ellipseGesture((8 - map.x_offset) / map.x_gain, 70, 1 / map.x_gain, 12));

    const outcome = await client.submit({
      respondent_id: "tsr4",
      question_id: question.id,
      stroke: { points: [...stroke], canvas_to_scale: map },
      interval_raw: { lo: 30, hi: 39 }, // nowhere near the drawing
    });
    expect(outcome.kind).toBe("mismatch");
    if (outcome.kind === "mismatch") {
      expect(outcome.diagnostic.server_interval_raw.lo).toBeCloseTo(7, 1);
      expect(outcome.diagnostic.server_interval_raw.hi).toBeCloseTo(9, 1);
    }
  }, 30_000);
});
