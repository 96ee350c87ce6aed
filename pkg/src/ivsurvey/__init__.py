"""Interval-valued survey toolkit: capture, aggregation, and analysis.

Submodules
----------
intervals   closed intervals, scales, stroke-to-interval extraction
survey      survey documents, append-only response log, benchmarks, export
agreement   group agreement (overlap proportion) functions over intervals
bootstrap   bootstrap t-tests, percentile CIs, Pearson r / MSE metrics
anova       repeated-measures ANOVA with sphericity correction, permutation checks
mixedmodel  REML fitting of the crossed random-intercepts model, simulation
plots       dependency-free SVG renderings of interval stacks and agreement
service     LAN workshop HTTP service for live collection
pipeline    end-to-end analysis runs producing tables, plots, and a manifest
"""

from .intervals import (
    CanvasMap,
    Interval,
    IntervalSummary,
    MalformedStrokeError,
    ScaleError,
    ScaleSpec,
    Stroke,
    extract_interval,
    normalize,
    summarize,
)
from .agreement import (
    AgreementFunction,
    EmptyAggregateError,
    build_agreement,
    discretize,
    membership,
    round_to_integers,
)
from .survey import (
    GroundTruth,
    LongExport,
    MarbleStimulus,
    Question,
    ResponseRecord,
    ResponseStore,
    SurveyDefinition,
    SurveyError,
    UnknownQuestionError,
    append_response,
    export_long,
    load_design,
    load_ground_truth,
    load_survey,
    make_record,
    marble_benchmark,
    parse_survey,
)
from .bootstrap import (
    DegenerateSampleError,
    TestResult,
    UndefinedCorrelationError,
    bootstrap_ci_mean,
    bootstrap_one_sample_t,
    bootstrap_paired_t,
    mse,
    pearson_r,
)
from .anova import (
    AnovaRow,
    AnovaTable,
    DesignError,
    RMDesign,
    UndefinedFError,
    gg_epsilon,
    mc_anova,
    one_sample_scale_midpoint_test,
    rm_anova_factorial,
    rm_anova_oneway,
)
from .mixedmodel import (
    FIXED_EFFECT_NAMES,
    ConvergenceError,
    FixedEffect,
    MixedModelFit,
    MixedModelSpec,
    VarianceComponents,
    fit_reml,
    information_criteria,
    reml_loglik,
    simulate_responses,
    vc_confints,
)
from .plots import PlotSpec, plot_iaa_svg, plot_intervals_svg

__version__ = "0.1.0"
