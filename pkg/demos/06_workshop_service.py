"""The full collection loop without a browser: serve the demo survey,
submit scripted ellipse strokes over HTTP, then run the analysis pipeline
on the resulting response log.

The server never trusts a client's extraction: it recomputes the interval
from the raw stroke and refuses submissions that disagree by more than
0.5 normalized units.
"""

import json
import os
import tempfile
from pathlib import Path

import httpx
import numpy as np

from ivsurvey.fixtures import ANIMAL_TRUTH, demo_survey
from ivsurvey.pipeline import PipelineConfig, run_pipeline
from ivsurvey.service import WorkshopService
from ivsurvey.survey import ResponseStore

os.environ.setdefault("IVSURVEY_ADMIN_TOKEN", "demo-admin-token")

workdir = Path(tempfile.mkdtemp(prefix="ivsurvey_demo_"))
survey = demo_survey()
survey_path = workdir / "survey.json"
survey_path.write_text(json.dumps(survey.to_document(), indent=2))
truth_path = workdir / "truth.json"
truth_path.write_text(
    json.dumps({q: {"lo": iv.lo, "hi": iv.hi} for q, iv in ANIMAL_TRUTH.items()})
)
log_path = workdir / "responses.jsonl"

rng = np.random.default_rng(99)
store = ResponseStore(log_path, survey)

with WorkshopService(survey, store) as service:
    print(f"workshop service on {service.base_url}")
    definition = httpx.get(service.base_url + "/survey").json()
    print(f"survey '{definition['survey_id']}' with {len(definition['questions'])} questions")

    for r in range(12):
        for qid, truth in ANIMAL_TRUTH.items():
            lo = float(np.clip(truth.lo + rng.normal(0, 1.0), 0, 40))
            hi = float(np.clip(truth.hi + rng.normal(0, 1.0), lo, 40))
            payload = {
                "respondent_id": f"resp{r:02d}",
                "question_id": qid,
                "stroke": {
                    "points": [[lo, 50, 0], [(lo + hi) / 2, 42, 40], [hi, 50, 80]],
                    "canvas_to_scale": {"x_offset": 0.0, "x_gain": 1.0},
                },
                "interval_raw": {"lo": lo, "hi": hi},
            }
            response = httpx.post(service.base_url + "/response", json=payload)
            assert response.status_code == 201, response.text

    # a deliberately inconsistent claim is bounced with the recomputation
    bad = {
        "respondent_id": "cheater",
        "question_id": "animal_cat",
        "stroke": {
            "points": [[15, 50, 0], [20, 50, 60]],
            "canvas_to_scale": {"x_offset": 0.0, "x_gain": 1.0},
        },
        "interval_raw": {"lo": 2.0, "hi": 38.0},
    }
    refused = httpx.post(service.base_url + "/response", json=bad)
    print(f"inconsistent claim -> HTTP {refused.status_code}: "
          f"server recomputed {refused.json()['server_interval_raw']}")

    exported = httpx.get(
        service.base_url + "/responses",
        headers={"Authorization": f"Bearer {os.environ['IVSURVEY_ADMIN_TOKEN']}"},
    )
    print(f"admin export: {len(exported.text.strip().splitlines())} records")

out_dir = workdir / "report"
run_pipeline(
    PipelineConfig(
        survey_path=survey_path,
        responses_path=log_path,
        out_dir=out_dir,
        analyses=("iaa", "corr"),
        truth_path=truth_path,
        B=10_000,
        seed=42,
    )
)
tests = json.loads((out_dir / "corr_tests.json").read_text())
print("\nanalysis outputs in", out_dir)
print("midpoint r-values vs zero:", tests["tests"]["midpoint_r_vs_zero"])
