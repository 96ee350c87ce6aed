"""End-to-end analysis runs: read a survey and its response log, execute the
selected analyses, and write result tables, SVG plots, and a manifest.

Every number in the outputs comes from a library operation (agreement,
bootstrap, anova, mixedmodel); this module only routes data and formats
files. Outputs are deterministic: a fixed config and seed reproduce every
table byte for byte. Sub-seeds for the individual resampling operations are
derived from the config seed with ``numpy.random.SeedSequence(seed).spawn``
in a fixed documented order (midpoint before width, tests in file order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import agreement as agg
from . import anova as rm
from . import bootstrap as bs
from . import mixedmodel as mixed
from .intervals import Interval
from .plots import PlotSpec, plot_iaa_svg, plot_intervals_svg
from .survey import (
    GroundTruth,
    ResponseStore,
    SurveyDefinition,
    SurveyError,
    load_design,
    load_ground_truth,
    load_survey,
)

ANALYSES = ("iaa", "corr", "anova", "mc-anova", "mixed")


@dataclass(frozen=True)
class PipelineConfig:
    survey_path: Path
    responses_path: Path
    out_dir: Path
    analyses: tuple[str, ...]
    truth_path: Path | None = None
    design_paths: tuple[Path, ...] = ()
    B: int = 10_000
    M: int = 10_000
    seed: int = 0
    iaa_step: float = 1.0
    iaa_round: bool = True
    vc_ci_refits: int = 0

    def __post_init__(self):
        unknown = [a for a in self.analyses if a not in ANALYSES]
        if unknown:
            raise ValueError(f"unknown analyses: {unknown}; available: {ANALYSES}")
        if self.B < 1 or self.M < 1:
            raise ValueError("B and M must be >= 1")
        if "corr" in self.analyses and self.truth_path is None:
            raise ValueError("corr analysis requires a truth table")
        if any(a in self.analyses for a in ("anova", "mc-anova", "mixed")) and not self.design_paths:
            raise ValueError("anova/mc-anova/mixed analyses require a design table")


@dataclass
class ReportBundle:
    out_dir: Path
    outputs: list[str] = field(default_factory=list)

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8")
        self.outputs.append(name)
        return path


def _fmt_cell(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def _csv(rows: Sequence[Sequence]) -> str:
    return "\n".join(",".join(_fmt_cell(v) for v in row) for row in rows) + "\n"


def _respondent_series(
    store: ResponseStore, truth_norm: Mapping[str, Interval]
) -> tuple[dict[str, list[str]], dict]:
    """Per respondent, the truth questions they answered (sorted ids)."""
    latest = store.latest_records()
    by_respondent: dict[str, list[str]] = {}
    for respondent, qid in sorted(latest):
        if qid in truth_norm:
            by_respondent.setdefault(respondent, []).append(qid)
    return by_respondent, latest


def run_corr(
    store: ResponseStore,
    survey: SurveyDefinition,
    truth: GroundTruth,
    bundle: ReportBundle,
    B: int,
    seed: int,
) -> None:
    """Per-respondent correlation and MSE against truth, with bootstrap tests.

    Respondents whose responses are constant (undefined correlation) are
    excluded from the r-value sample and listed in the diagnostics file.
    """
    truth.validate_against(survey)
    truth_norm = truth.normalized(survey)
    by_respondent, latest = _respondent_series(store, truth_norm)

    sub_seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(4)]
    summary: dict = {"excluded": {}, "tests": {}, "B": B, "seed": seed}
    for dv_index, dv in enumerate(("midpoint", "width")):
        rows = [("respondent", "r", "mse")]
        r_values, mse_values, excluded = [], [], []
        for respondent, qids in sorted(by_respondent.items()):
            if len(qids) < 2:
                excluded.append(respondent)
                continue
            observed = [getattr(latest[(respondent, q)].interval_norm, dv) for q in qids]
            expected = [getattr(truth_norm[q], dv) for q in qids]
            err = bs.mse(observed, expected)
            try:
                r = bs.pearson_r(observed, expected)
            except bs.UndefinedCorrelationError:
                excluded.append(respondent)
                continue
            rows.append((respondent, r, err))
            r_values.append(r)
            mse_values.append(err)
        bundle.write_text(f"corr_{dv}.csv", _csv(rows))
        summary["excluded"][dv] = excluded
        if len(r_values) >= 2:
            try:
                test = bs.bootstrap_one_sample_t(r_values, 0.0, B=B, seed=sub_seeds[dv_index])
                summary["tests"][f"{dv}_r_vs_zero"] = test.as_record()
            except bs.DegenerateSampleError:
                # perfect reproduction yields a constant r sample; report the
                # degeneracy instead of a fabricated p-value
                summary["tests"][f"{dv}_r_vs_zero"] = {
                    "degenerate": True,
                    "mean": float(np.mean(r_values)),
                    "B": B,
                }
        if len(mse_values) >= 2:
            lo, hi = bs.bootstrap_ci_mean(mse_values, B=B, seed=sub_seeds[2 + dv_index])
            summary["tests"][f"{dv}_mse_mean_ci"] = {
                "mean": float(np.mean(mse_values)),
                "ci_lo": lo,
                "ci_hi": hi,
                "B": B,
            }
    bundle.write_text("corr_tests.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")


def run_iaa(
    store: ResponseStore,
    survey: SurveyDefinition,
    bundle: ReportBundle,
    step: float,
    round_first: bool,
) -> None:
    """Agreement function, discretization, and plots per answered question."""
    latest = store.latest_records()
    by_question: dict[str, list[Interval]] = {}
    for (_, qid), record in sorted(latest.items()):
        by_question.setdefault(qid, []).append(record.interval_raw)
    for question in survey.questions:
        intervals = by_question.get(question.id)
        if not intervals:
            continue
        plotted = agg.round_to_integers(intervals) if round_first else intervals
        af = agg.build_agreement(plotted)
        samples = af.discretize(step, start=question.scale.min, stop=question.scale.max)
        rows = [("x", "membership")] + [(x, m) for x, m in samples]
        bundle.write_text(f"iaa_{question.id}.csv", _csv(rows))
        bundle.write_text(
            f"iaa_{question.id}.svg", plot_iaa_svg(af, question.scale, PlotSpec(style="iaa"))
        )
        bundle.write_text(
            f"intervals_{question.id}.svg",
            plot_intervals_svg(plotted, question.scale, PlotSpec(style="interval_stack")),
        )


def _pivot(
    store: ResponseStore, design: Mapping[str, Mapping[str, str]], dv: str
) -> tuple[rm.RMDesign, tuple[str, ...]]:
    """Build the complete subjects x conditions matrix for one DV."""
    factor_names: tuple[str, ...] = ()
    for levels in design.values():
        factor_names = tuple(levels.keys())
        break
    if len(factor_names) not in (1, 2):
        raise SurveyError("anova designs need one or two factor columns")

    level_values: list[list[str]] = [[] for _ in factor_names]
    cell_to_question: dict[tuple[str, ...], str] = {}
    for qid, levels in design.items():
        cell = tuple(levels[name] for name in factor_names)
        if cell in cell_to_question:
            raise SurveyError(f"questions '{cell_to_question[cell]}' and '{qid}' share a design cell")
        cell_to_question[cell] = qid
        for i, value in enumerate(cell):
            if value not in level_values[i]:
                level_values[i].append(value)

    latest = store.latest_records()
    respondents = sorted({resp for (resp, qid) in latest if qid in design})
    shape = tuple(len(v) for v in level_values)
    data = np.full((len(respondents), *shape), np.nan)
    for r_i, respondent in enumerate(respondents):
        for cell, qid in cell_to_question.items():
            idx = tuple(level_values[i].index(cell[i]) for i in range(len(cell)))
            record = latest.get((respondent, qid))
            if record is None:
                raise SurveyError(
                    f"incomplete design: respondent '{respondent}' missing question '{qid}'"
                )
            data[(r_i, *idx)] = getattr(record.interval_norm, dv)
    return rm.RMDesign(data, factor_names=factor_names), factor_names


def run_anova(
    store: ResponseStore,
    design: Mapping[str, Mapping[str, str]],
    bundle: ReportBundle,
    tag: str = "",
) -> None:
    for dv in ("midpoint", "width"):
        rmd, factor_names = _pivot(store, design, dv)
        table = (
            rm.rm_anova_oneway(rmd) if len(factor_names) == 1 else rm.rm_anova_factorial(rmd)
        )
        bundle.write_text(f"anova_{tag}{dv}.csv", table.to_csv())


def run_mc_anova(
    store: ResponseStore,
    design: Mapping[str, Mapping[str, str]],
    bundle: ReportBundle,
    M: int,
    seed: int,
    tag: str = "",
) -> None:
    sub_seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(2)]
    for dv, sub_seed in zip(("midpoint", "width"), sub_seeds):
        rmd, _ = _pivot(store, design, dv)
        p_values = rm.mc_anova(rmd, M=M, seed=sub_seed)
        rows = [("effect", "p")] + [(effect, p) for effect, p in p_values.items()]
        bundle.write_text(f"mc_anova_{tag}{dv}.csv", _csv(rows))


def _is_covariate_design(design: Mapping[str, Mapping[str, str]]) -> bool:
    """True when every entry carries the mixed-model covariate columns."""
    return bool(design) and all(
        {"xB", "xH", "xD"} <= set(levels.keys()) for levels in design.values()
    )


def run_mixed(
    store: ResponseStore,
    design: Mapping[str, Mapping[str, str]],
    bundle: ReportBundle,
    seed: int,
    vc_ci_refits: int,
    tag: str = "",
) -> None:
    """Fit the crossed-intercepts model per DV (responses as scale proportions)."""
    for name in ("xB", "xH", "xD"):
        for qid, levels in design.items():
            if name not in levels:
                raise SurveyError(f"mixed design needs column '{name}' (missing for '{qid}')")
    latest = store.latest_records()
    kept = sorted((resp, qid) for (resp, qid) in latest if qid in design)
    if not kept:
        raise SurveyError("no responses match the mixed-model design")
    sub_seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(2)]
    for dv, sub_seed in zip(("midpoint", "width"), sub_seeds):
        spec = mixed.MixedModelSpec(
            participant=tuple(resp for resp, _ in kept),
            item=tuple(qid for _, qid in kept),
            x_blue=np.array([float(design[qid]["xB"]) for _, qid in kept]),
            x_hidden=np.array([float(design[qid]["xH"]) for _, qid in kept]),
            x_disc=np.array([float(design[qid]["xD"]) for _, qid in kept]),
            response=np.array(
                [getattr(latest[key].interval_norm, dv) / 100.0 for key in kept]
            ),
        )
        fit = mixed.fit_reml(spec)
        bundle.write_text(f"mixed_{tag}{dv}.csv", _csv(fit.to_rows()))
        if vc_ci_refits > 0:
            cis = mixed.vc_confints(spec, fit, refits=vc_ci_refits, seed=sub_seed)
            rows = [("component", "ci_lo", "ci_hi")] + [
                (name, lo, hi) for name, (lo, hi) in sorted(cis.items())
            ]
            bundle.write_text(f"mixed_{tag}{dv}_vc_ci.csv", _csv(rows))


def run_pipeline(config: PipelineConfig) -> ReportBundle:
    """Execute the configured analyses and write the report bundle."""
    survey = load_survey(config.survey_path)
    store = ResponseStore(config.responses_path, survey)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    bundle = ReportBundle(out_dir=config.out_dir)

    designs = [(path, load_design(path)) for path in config.design_paths]
    factor_designs = [(p, d) for p, d in designs if not _is_covariate_design(d)]
    covariate_designs = [(p, d) for p, d in designs if _is_covariate_design(d)]

    def _tag(path: Path, group: list) -> str:
        return f"{Path(path).stem}_" if len(group) > 1 else ""

    for analysis in config.analyses:
        if analysis == "iaa":
            run_iaa(store, survey, bundle, config.iaa_step, config.iaa_round)
        elif analysis == "corr":
            truth = load_ground_truth(config.truth_path)
            run_corr(store, survey, truth, bundle, config.B, config.seed)
        elif analysis == "anova":
            for path, design in factor_designs:
                run_anova(store, design, bundle, tag=_tag(path, factor_designs))
        elif analysis == "mc-anova":
            for path, design in factor_designs:
                run_mc_anova(
                    store, design, bundle, config.M, config.seed, tag=_tag(path, factor_designs)
                )
        elif analysis == "mixed":
            for path, design in covariate_designs:
                run_mixed(
                    store,
                    design,
                    bundle,
                    config.seed,
                    config.vc_ci_refits,
                    tag=_tag(path, covariate_designs),
                )

    manifest = {
        "analyses": list(config.analyses),
        "B": config.B,
        "M": config.M,
        "seed": config.seed,
        "outputs": sorted(bundle.outputs),
    }
    bundle.write_text("manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return bundle
