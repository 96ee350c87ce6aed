"""LAN workshop service: serves one survey and ingests drawn responses.

Endpoints
---------
GET /survey
    The survey definition document (byte-stable across calls).
POST /response
    A drawn response: respondent id, question id, the raw stroke, and an
    optional client-extracted interval. The server re-runs extraction and
    normalization from the stroke itself and refuses submissions whose
    client claim disagrees by more than 0.5 normalized units, echoing the
    recomputed interval so the client can re-confirm.
GET /responses
    The raw response log (newline-delimited records); requires a bearer
    token taken from the environment variable named at startup.

The service runs one survey per process over plain HTTP, matching a
room-scale deployment where respondents' devices reach the administrator's
machine over the local network. Appends go through the store's
record-granularity lock, so concurrent respondents serialize per record.
"""

from __future__ import annotations

import json
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .intervals import (
    CanvasMap,
    Interval,
    MalformedStrokeError,
    ScaleError,
    Stroke,
    extract_interval,
    normalize,
)
from .survey import ResponseStore, SurveyDefinition, UnknownQuestionError, make_record

MISMATCH_TOLERANCE = 0.5  # normalized units


class PayloadError(ValueError):
    """Malformed submission payload; carries the offending field names."""

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = fields or []


def parse_submission(payload: dict) -> tuple[str, str, Stroke, Interval | None]:
    """Validate a /response payload into (respondent, question, stroke, claim)."""
    missing = [f for f in ("respondent_id", "question_id", "stroke") if f not in payload]
    if missing:
        raise PayloadError(f"missing fields: {', '.join(missing)}", missing)
    raw_stroke = payload["stroke"]
    try:
        points = tuple((p[0], p[1], p[2]) for p in raw_stroke["points"])
        cmap = CanvasMap(
            x_offset=float(raw_stroke["canvas_to_scale"]["x_offset"]),
            x_gain=float(raw_stroke["canvas_to_scale"]["x_gain"]),
        )
        stroke = Stroke(points=points, canvas_to_scale=cmap)
    except (KeyError, TypeError, IndexError) as exc:
        raise PayloadError(f"malformed stroke: {exc}", ["stroke"]) from exc
    except (MalformedStrokeError, ScaleError) as exc:
        raise PayloadError(str(exc), ["stroke"]) from exc
    claim = None
    if payload.get("interval_raw") is not None:
        try:
            claim = Interval(float(payload["interval_raw"]["lo"]), float(payload["interval_raw"]["hi"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise PayloadError(f"malformed interval_raw: {exc}", ["interval_raw"]) from exc
    return str(payload["respondent_id"]), str(payload["question_id"]), stroke, claim


class WorkshopService:
    """Embedded HTTP server bound to one survey and one response store."""

    def __init__(
        self,
        survey: SurveyDefinition,
        store: ResponseStore,
        port: int = 0,
        admin_token_env: str = "IVSURVEY_ADMIN_TOKEN",
    ):
        self.survey = survey
        self.store = store
        self.admin_token_env = admin_token_env
        self._survey_bytes = json.dumps(survey.to_document(), sort_keys=True).encode("utf-8")
        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), self._make_handler())
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def start(self) -> "WorkshopService":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "WorkshopService":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    def handle_submission(self, payload: dict) -> tuple[int, dict]:
        """Core ingestion logic, also callable without HTTP for testing."""
        try:
            respondent_id, question_id, stroke, claim = parse_submission(payload)
        except PayloadError as exc:
            return 400, {"error": str(exc), "fields": exc.fields}
        try:
            question = self.survey.question(question_id)
        except UnknownQuestionError as exc:
            return 404, {"error": str(exc)}
        extracted = extract_interval(stroke, question.scale)
        extracted_norm = normalize(extracted, question.scale)
        if claim is not None:
            try:
                claim_norm = normalize(claim, question.scale)
            except ValueError as exc:
                return 400, {"error": f"claimed interval outside scale: {exc}", "fields": ["interval_raw"]}
            disagreement = max(
                abs(claim_norm.lo - extracted_norm.lo), abs(claim_norm.hi - extracted_norm.hi)
            )
            if disagreement > MISMATCH_TOLERANCE:
                return 409, {
                    "error": "client interval disagrees with server extraction",
                    "disagreement_normalized": disagreement,
                    "server_interval_raw": {"lo": extracted.lo, "hi": extracted.hi},
                    "server_interval_norm": {"lo": extracted_norm.lo, "hi": extracted_norm.hi},
                }
        record = make_record(
            self.survey, respondent_id, question_id, extracted, stroke=stroke
        )
        self.store.append(record)
        return 201, {
            "stored": {
                "respondent_id": respondent_id,
                "question_id": question_id,
                "interval_raw": {"lo": record.interval_raw.lo, "hi": record.interval_raw.hi},
                "interval_norm": {"lo": record.interval_norm.lo, "hi": record.interval_norm.hi},
                "submitted_at": record.submitted_at.isoformat(),
            }
        }

    def _make_handler(self):
        service = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def _send_json(self, status: int, payload: dict) -> None:
                body = json.dumps(payload, sort_keys=True).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/survey":
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(service._survey_bytes)))
                    self.end_headers()
                    self.wfile.write(service._survey_bytes)
                    return
                if self.path == "/responses":
                    expected = os.environ.get(service.admin_token_env)
                    supplied = self.headers.get("Authorization", "")
                    if not expected:
                        self._send_json(403, {"error": "no administrator token configured"})
                        return
                    if supplied != f"Bearer {expected}":
                        self._send_json(401, {"error": "invalid or missing bearer token"})
                        return
                    body = b""
                    if service.store.path.exists():
                        body = service.store.path.read_bytes()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/x-ndjson")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                self._send_json(404, {"error": f"unknown path {self.path}"})

            def do_POST(self):
                if self.path != "/response":
                    self._send_json(404, {"error": f"unknown path {self.path}"})
                    return
                length = int(self.headers.get("Content-Length", "0"))
                try:
                    payload = json.loads(self.rfile.read(length).decode("utf-8"))
                    if not isinstance(payload, dict):
                        raise ValueError("payload must be a JSON object")
                except ValueError as exc:
                    self._send_json(400, {"error": f"invalid JSON: {exc}", "fields": []})
                    return
                status, body = service.handle_submission(payload)
                self._send_json(status, body)

        return Handler


def serve(
    survey: SurveyDefinition,
    store: ResponseStore,
    port: int = 0,
    admin_token_env: str = "IVSURVEY_ADMIN_TOKEN",
) -> WorkshopService:
    """Start a workshop service; returns the running instance (callers stop it)."""
    return WorkshopService(survey, store, port=port, admin_token_env=admin_token_env).start()
