"""Command-line entry point.

Subcommands
-----------
serve     run the workshop service for live response collection
analyze   run one analysis (iaa | corr | anova | mc-anova | mixed) offline
simulate  draw a synthetic dataset from the generative mixed model
plot      render an interval file as an interval-stack or agreement SVG

The CLI performs no arithmetic of its own; it parses arguments, reads
files, and delegates to the library modules.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .agreement import build_agreement
from .intervals import Interval, ScaleSpec
from .mixedmodel import VarianceComponents, simulate_responses
from .pipeline import PipelineConfig, run_pipeline
from .plots import PlotSpec, plot_iaa_svg, plot_intervals_svg
from .service import WorkshopService
from .survey import ResponseStore, load_survey


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ivsurvey", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="serve a survey and collect responses")
    p_serve.add_argument("--survey", required=True, type=Path)
    p_serve.add_argument("--out", required=True, type=Path, help="response log path")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--admin-token-env", default="IVSURVEY_ADMIN_TOKEN")

    p_an = sub.add_parser("analyze", help="run an analysis over a response log")
    p_an.add_argument("analysis", choices=["iaa", "corr", "anova", "mc-anova", "mixed"])
    p_an.add_argument("--responses", required=True, type=Path)
    p_an.add_argument("--survey", required=True, type=Path)
    p_an.add_argument("--truth", type=Path)
    p_an.add_argument("--design", type=Path, action="append", default=[])
    p_an.add_argument("--B", type=int, default=10_000)
    p_an.add_argument("--M", type=int, default=10_000)
    p_an.add_argument("--seed", type=int, required=True)
    p_an.add_argument("--out", required=True, type=Path, help="output directory")
    p_an.add_argument("--vc-ci-refits", type=int, default=0)

    p_sim = sub.add_parser("simulate", help="simulate mixed-model responses")
    p_sim.add_argument("--params", required=True, type=Path)
    p_sim.add_argument("--participants", required=True, type=int)
    p_sim.add_argument("--seed", required=True, type=int)
    p_sim.add_argument("--out", required=True, type=Path)

    p_plot = sub.add_parser("plot", help="render an interval file as SVG")
    p_plot.add_argument("kind", choices=["intervals", "iaa"])
    p_plot.add_argument("--in", dest="infile", required=True, type=Path)
    p_plot.add_argument("--out", required=True, type=Path)
    p_plot.add_argument("--scale-min", type=float)
    p_plot.add_argument("--scale-max", type=float)
    return parser


def _read_intervals(path: Path) -> list[Interval]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"lo", "hi"} <= set(reader.fieldnames):
            raise SystemExit("interval file needs 'lo' and 'hi' columns")
        return [Interval(float(row["lo"]), float(row["hi"])) for row in reader]


def _cmd_serve(args) -> int:
    survey = load_survey(args.survey)
    store = ResponseStore(args.out, survey)
    service = WorkshopService(
        survey, store, port=args.port, admin_token_env=args.admin_token_env
    )
    print(f"serving survey '{survey.survey_id}' on {service.base_url}", flush=True)
    print(f"responses -> {args.out}", flush=True)
    service.start()
    try:
        service._thread.join()
    except KeyboardInterrupt:
        service.stop()
    return 0


def _cmd_analyze(args) -> int:
    config = PipelineConfig(
        survey_path=args.survey,
        responses_path=args.responses,
        out_dir=args.out,
        analyses=(args.analysis,),
        truth_path=args.truth,
        design_paths=tuple(args.design),
        B=args.B,
        M=args.M,
        seed=args.seed,
        vc_ci_refits=args.vc_ci_refits,
    )
    bundle = run_pipeline(config)
    for name in sorted(bundle.outputs):
        print(name)
    return 0


def _cmd_simulate(args) -> int:
    params = json.loads(Path(args.params).read_text(encoding="utf-8"))
    coeffs = params["coefficients"]
    if isinstance(coeffs, dict):
        from .mixedmodel import FIXED_EFFECT_NAMES

        b = [float(coeffs[name]) for name in FIXED_EFFECT_NAMES]
    else:
        b = [float(v) for v in coeffs]
    vc = VarianceComponents(
        sigma_participant=float(params["sigma_participant"]),
        sigma_item=float(params["sigma_item"]),
        sigma_resid=float(params["sigma_resid"]),
    )
    items = [tuple(float(v) for v in row) for row in params["items"]]
    spec = simulate_responses(
        b,
        vc,
        n_participants=args.participants,
        items=items,
        seed=args.seed,
        clamp=bool(params.get("clamp", False)),
    )
    Path(args.out).write_text(spec.to_table(), encoding="utf-8")
    print(f"wrote {spec.n_obs} observations to {args.out}")
    return 0


def _cmd_plot(args) -> int:
    intervals = _read_intervals(args.infile)
    if not intervals:
        raise SystemExit("no intervals in input file")
    lo = args.scale_min if args.scale_min is not None else min(iv.lo for iv in intervals)
    hi = args.scale_max if args.scale_max is not None else max(iv.hi for iv in intervals)
    if hi <= lo:
        hi = lo + 1.0
    scale = ScaleSpec(lo, hi, str(lo), str(hi))
    if args.kind == "intervals":
        svg = plot_intervals_svg(intervals, scale, PlotSpec(style="interval_stack"))
    else:
        svg = plot_iaa_svg(build_agreement(intervals), scale, PlotSpec(style="iaa"))
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "serve": _cmd_serve,
        "analyze": _cmd_analyze,
        "simulate": _cmd_simulate,
        "plot": _cmd_plot,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
