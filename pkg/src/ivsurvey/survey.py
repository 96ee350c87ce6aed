"""Survey instruments, response persistence, benchmarks, and long-format export.

A survey definition is a JSON document; responses accumulate in an
append-only JSONL log (one record per line, ISO-8601 UTC timestamps).
Supersession of repeated answers to the same question by the same
respondent is resolved at export time, never at write time, so the log
stays a faithful audit trail.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Mapping

from .intervals import CanvasMap, Interval, ScaleError, ScaleSpec, Stroke, normalize

SECTIONS = ("reproduce", "marbles", "subjective", "feedback")


class SurveyError(ValueError):
    """Invalid survey document or store operation; messages name the question id."""


class UnknownQuestionError(SurveyError):
    """A record references a question id absent from the survey."""


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    scale: ScaleSpec
    section: str
    stimulus_ref: str | None = None

    def __post_init__(self):
        if self.section not in SECTIONS:
            raise SurveyError(f"question '{self.id}': unknown section tag '{self.section}'")


@dataclass(frozen=True)
class SurveyDefinition:
    survey_id: str
    title: str
    questions: tuple[Question, ...]

    def __post_init__(self):
        object.__setattr__(self, "questions", tuple(self.questions))
        if not self.questions:
            raise SurveyError("survey must contain at least one question")
        seen: set[str] = set()
        for q in self.questions:
            if q.id in seen:
                raise SurveyError(f"duplicate question id '{q.id}'")
            seen.add(q.id)

    def question(self, question_id: str) -> Question:
        for q in self.questions:
            if q.id == question_id:
                return q
        raise UnknownQuestionError(f"unknown question id '{question_id}'")

    def question_ids(self) -> list[str]:
        return [q.id for q in self.questions]

    def to_document(self) -> dict:
        return {
            "survey_id": self.survey_id,
            "title": self.title,
            "questions": [
                {
                    "id": q.id,
                    "text": q.text,
                    "section": q.section,
                    "scale": {
                        "min": q.scale.min,
                        "max": q.scale.max,
                        "left_label": q.scale.left_label,
                        "right_label": q.scale.right_label,
                        "ticks": list(q.scale.tick_values),
                    },
                    "stimulus_ref": q.stimulus_ref,
                }
                for q in self.questions
            ],
        }


def parse_survey(document: Mapping) -> SurveyDefinition:
    """Validate a parsed survey document into a SurveyDefinition."""
    try:
        raw_questions = document["questions"]
    except KeyError as exc:
        raise SurveyError("survey document missing 'questions'") from exc
    questions = []
    for raw in raw_questions:
        qid = str(raw.get("id", "<missing id>"))
        try:
            sc = raw["scale"]
            scale = ScaleSpec(
                min=float(sc["min"]),
                max=float(sc["max"]),
                left_label=str(sc.get("left_label", "")),
                right_label=str(sc.get("right_label", "")),
                tick_values=tuple(sc.get("ticks", ())),
            )
        except ScaleError as exc:
            raise SurveyError(f"question '{qid}': {exc}") from exc
        except KeyError as exc:
            raise SurveyError(f"question '{qid}': missing scale field {exc}") from exc
        questions.append(
            Question(
                id=qid,
                text=str(raw.get("text", "")),
                scale=scale,
                section=str(raw.get("section", "subjective")),
                stimulus_ref=raw.get("stimulus_ref"),
            )
        )
    return SurveyDefinition(
        survey_id=str(document.get("survey_id", "")),
        title=str(document.get("title", "")),
        questions=tuple(questions),
    )


def load_survey(source: str | Path) -> SurveyDefinition:
    """Load and validate a survey definition from a JSON file."""
    text = Path(source).read_text(encoding="utf-8")
    return parse_survey(json.loads(text))


# ---------------------------------------------------------------------------
# Response records and the append-only store


@dataclass(frozen=True)
class ResponseRecord:
    survey_id: str
    respondent_id: str
    question_id: str
    interval_raw: Interval
    interval_norm: Interval
    submitted_at: datetime
    stroke: Stroke | None = None

    def to_json_line(self) -> str:
        payload = {
            "survey_id": self.survey_id,
            "respondent_id": self.respondent_id,
            "question_id": self.question_id,
            "interval_raw": {"lo": self.interval_raw.lo, "hi": self.interval_raw.hi},
            "interval_norm": {"lo": self.interval_norm.lo, "hi": self.interval_norm.hi},
            "submitted_at": self.submitted_at.astimezone(timezone.utc).isoformat(),
            "stroke": None
            if self.stroke is None
            else {
                "points": [[x, y, t] for x, y, t in self.stroke.points],
                "canvas_to_scale": {
                    "x_offset": self.stroke.canvas_to_scale.x_offset,
                    "x_gain": self.stroke.canvas_to_scale.x_gain,
                },
            },
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "ResponseRecord":
        d = json.loads(line)
        stroke = None
        if d.get("stroke") is not None:
            s = d["stroke"]
            stroke = Stroke(
                points=tuple((p[0], p[1], p[2]) for p in s["points"]),
                canvas_to_scale=CanvasMap(
                    x_offset=s["canvas_to_scale"]["x_offset"],
                    x_gain=s["canvas_to_scale"]["x_gain"],
                ),
            )
        return cls(
            survey_id=d["survey_id"],
            respondent_id=d["respondent_id"],
            question_id=d["question_id"],
            interval_raw=Interval(d["interval_raw"]["lo"], d["interval_raw"]["hi"]),
            interval_norm=Interval(d["interval_norm"]["lo"], d["interval_norm"]["hi"]),
            submitted_at=datetime.fromisoformat(d["submitted_at"]),
            stroke=stroke,
        )


def make_record(
    survey: SurveyDefinition,
    respondent_id: str,
    question_id: str,
    interval_raw: Interval,
    *,
    stroke: Stroke | None = None,
    submitted_at: datetime | None = None,
) -> ResponseRecord:
    """Build a consistent record (normalized interval derived, UTC timestamp)."""
    question = survey.question(question_id)
    when = submitted_at or datetime.now(timezone.utc)
    return ResponseRecord(
        survey_id=survey.survey_id,
        respondent_id=respondent_id,
        question_id=question_id,
        interval_raw=interval_raw,
        interval_norm=normalize(interval_raw, question.scale),
        submitted_at=when,
        stroke=stroke,
    )


class ResponseStore:
    """Append-only JSONL response log bound to one survey.

    Appends serialize at record granularity (single locked write of one
    line); readers see a consistent prefix of the log. Duplicate answers
    are kept; the latest by ``submitted_at`` (file order breaking ties)
    wins at export.
    """

    def __init__(self, path: str | Path, survey: SurveyDefinition):
        self.path = Path(path)
        self.survey = survey
        self._lock = threading.Lock()

    def append(self, record: ResponseRecord) -> ResponseRecord:
        question = self.survey.question(record.question_id)  # raises on unknown id
        if not question.scale.contains(record.interval_raw):
            raise SurveyError(
                f"question '{record.question_id}': interval "
                f"[{record.interval_raw.lo}, {record.interval_raw.hi}] outside scale "
                f"[{question.scale.min}, {question.scale.max}]"
            )
        expected = normalize(record.interval_raw, question.scale)
        if (
            abs(expected.lo - record.interval_norm.lo) > 1e-9
            or abs(expected.hi - record.interval_norm.hi) > 1e-9
        ):
            raise SurveyError(
                f"question '{record.question_id}': normalized interval inconsistent with raw"
            )
        line = record.to_json_line() + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
        return record

    def __iter__(self) -> Iterator[ResponseRecord]:
        if not self.path.exists():
            return iter(())
        with open(self.path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
        return (ResponseRecord.from_json_line(line) for line in lines if line.strip())

    def latest_records(self) -> dict[tuple[str, str], ResponseRecord]:
        """Last-write-wins view keyed by (respondent, question)."""
        best: dict[tuple[str, str], tuple[datetime, int, ResponseRecord]] = {}
        for position, record in enumerate(self):
            key = (record.respondent_id, record.question_id)
            stamp = (record.submitted_at, position, record)
            if key not in best or stamp[:2] >= best[key][:2]:
                best[key] = stamp
        return {key: rec for key, (_, _, rec) in best.items()}


def append_response(store: ResponseStore, record: ResponseRecord) -> ResponseRecord:
    """Validate and durably append a record; returns the stored record."""
    return store.append(record)


# ---------------------------------------------------------------------------
# Ground truth


@dataclass(frozen=True)
class GroundTruth:
    """Reference intervals keyed by question id, in scale units."""

    intervals: Mapping[str, Interval]

    def validate_against(self, survey: SurveyDefinition) -> None:
        for qid, truth in self.intervals.items():
            question = survey.question(qid)
            if not question.scale.contains(truth):
                raise SurveyError(f"question '{qid}': truth interval outside scale")

    def normalized(self, survey: SurveyDefinition) -> dict[str, Interval]:
        return {
            qid: normalize(iv, survey.question(qid).scale) for qid, iv in self.intervals.items()
        }


def load_ground_truth(source: str | Path) -> GroundTruth:
    """Read a JSON mapping of question id -> {lo, hi} in scale units."""
    raw = json.loads(Path(source).read_text(encoding="utf-8"))
    return GroundTruth({qid: Interval(v["lo"], v["hi"]) for qid, v in raw.items()})


# ---------------------------------------------------------------------------
# Marble stimuli and the objective benchmark


@dataclass(frozen=True)
class MarbleStimulus:
    """A grid of marble rows, possibly partially hidden.

    Each row is (visible_blue, visible_total, hidden); visible and hidden
    counts in a row sum to ``row_size``.
    """

    rows: tuple[tuple[int, int, int], ...]
    row_size: int = 7
    row_count: int = 5

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(int(v) for v in r) for r in self.rows))
        if len(self.rows) != self.row_count:
            raise ValueError(f"expected {self.row_count} rows, got {len(self.rows)}")
        for i, (blue, total, hidden) in enumerate(self.rows):
            if min(blue, total, hidden) < 0:
                raise ValueError(f"row {i}: negative count")
            if blue > total:
                raise ValueError(f"row {i}: visible blue ({blue}) exceeds visible total ({total})")
            if total + hidden != self.row_size:
                raise ValueError(
                    f"row {i}: visible ({total}) + hidden ({hidden}) != row size ({self.row_size})"
                )

    def covariates(self) -> tuple[float, float, float]:
        """(blue proportion of visible, hidden proportion, visible row discrepancy).

        The discrepancy is the spread of visible blue counts between rows,
        as a proportion of the row size.
        """
        visible_total = sum(t for _, t, _ in self.rows)
        if visible_total == 0:
            raise ValueError("covariates undefined when every marble is hidden")
        blue_total = sum(b for b, _, _ in self.rows)
        hidden_total = sum(h for _, _, h in self.rows)
        blues = [b for b, _, _ in self.rows]
        return (
            blue_total / visible_total,
            hidden_total / (self.row_size * self.row_count),
            (max(blues) - min(blues)) / self.row_size,
        )


def marble_benchmark(stim: MarbleStimulus) -> Interval:
    """Objective bounds on the per-row blue count across all rows.

    The least possible count in any row is its visible blue total (all
    hidden marbles yellow); the greatest is visible blue plus hidden (all
    hidden blue). The benchmark interval spans those bounds over the rows.
    """
    lo = min(blue for blue, _, _ in stim.rows)
    hi = max(blue + hidden for blue, _, hidden in stim.rows)
    return Interval(float(lo), float(hi))


# ---------------------------------------------------------------------------
# Long-format export


@dataclass(frozen=True)
class LongExport:
    """Long-format analysis table: one row per retained (respondent, question)."""

    factor_names: tuple[str, ...]
    rows: tuple[tuple, ...]  # (respondent, question, *factor levels, midpoint, width)
    skipped: tuple[str, ...]  # question ids with no design entry

    @property
    def header(self) -> tuple[str, ...]:
        return ("respondent", "question") + self.factor_names + ("midpoint", "width")

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        for row in self.rows:
            lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
        return "\n".join(lines) + "\n"


def export_long(
    store: ResponseStore, design: Mapping[str, Mapping[str, str]]
) -> LongExport:
    """Flatten retained responses into factor-coded rows of midpoint and width.

    ``design`` maps question id to its factor levels (all entries must
    share the same factor names). Questions present in the store but not
    in the design are reported in ``skipped`` rather than exported;
    midpoint and width are in normalized [0, 100] units.
    """
    factor_names: tuple[str, ...] = ()
    for levels in design.values():
        factor_names = tuple(levels.keys())
        break
    for qid, levels in design.items():
        if tuple(levels.keys()) != factor_names:
            raise SurveyError(f"question '{qid}': inconsistent factor names in design")

    latest = store.latest_records()
    rows = []
    skipped = set()
    for (respondent, question_id), record in sorted(latest.items()):
        if question_id not in design:
            skipped.add(question_id)
            continue
        levels = design[question_id]
        norm = record.interval_norm
        rows.append(
            (respondent, question_id)
            + tuple(levels[name] for name in factor_names)
            + (norm.midpoint, norm.width)
        )
    return LongExport(
        factor_names=factor_names, rows=tuple(rows), skipped=tuple(sorted(skipped))
    )


def load_design(source: str | Path) -> dict[str, dict[str, str]]:
    """Read a factor-coding table: CSV with a ``question`` column plus factors."""
    import csv

    with open(source, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "question" not in reader.fieldnames:
            raise SurveyError("design table needs a 'question' column")
        factors = [name for name in reader.fieldnames if name != "question"]
        design = {}
        for row in reader:
            design[row["question"]] = {name: row[name] for name in factors}
    return design
