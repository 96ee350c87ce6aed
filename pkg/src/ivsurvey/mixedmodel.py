"""Linear mixed-effects model with two crossed random intercepts, fitted by
restricted maximum likelihood (REML).

The response (interval midpoint or width as a proportion of the scale) is
modelled as

    y = X b + u_participant + u_item + e

with seven fixed-effect columns (intercept, the three stimulus
proportions, and their three pairwise products) and independent normal
random intercepts per participant and per item. The marginal covariance
is ``V = sp^2 Zp Zp' + sq^2 Zq Zq' + sr^2 I``.

The restricted log-likelihood profiles the fixed effects out by
generalized least squares:

    l_R = -1/2 [ (n - p) log 2*pi + log|V| + log|X' V^-1 X| + r' V^-1 r ]

and is evaluated through the Woodbury identity on the (participants +
items)-dimensional inner matrix, so each evaluation costs O(m^3) for m
random-effect levels rather than O(n^3). The search runs in log space
over the two variance ratios sigma/sigma_resid with the residual scale
profiled out in closed form (which keeps the noiseless limit
well-behaved), using a Nelder-Mead simplex restarted once from a
perturbed point; fixed-effect standard errors come from the GLS
covariance at the optimum with residual degrees of freedom ``n - p``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .optimize import nelder_mead

FIXED_EFFECT_NAMES = (
    "intercept",
    "blue_visible",
    "hidden",
    "row_discrepancy",
    "blue_visible:hidden",
    "blue_visible:row_discrepancy",
    "row_discrepancy:hidden",
)

_LOG_SIGMA_BOUND = 46.0  # exp(+-46) spans ~1e-20..1e20; keeps V numerically sane


class ConvergenceError(RuntimeError):
    """REML search did not converge; carries the best state found."""

    def __init__(self, message: str, best: "MixedModelFit | None" = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class VarianceComponents:
    """Standard deviations of the participant, item, and residual terms."""

    sigma_participant: float
    sigma_item: float
    sigma_resid: float

    def __post_init__(self):
        if self.sigma_participant < 0 or self.sigma_item < 0:
            raise ValueError("random-intercept standard deviations must be nonnegative")
        if not self.sigma_resid > 0:
            raise ValueError("residual standard deviation must be positive")


@dataclass(frozen=True)
class MixedModelSpec:
    """Observations for the crossed-intercepts model.

    ``participant`` and ``item`` are per-observation labels; the three
    covariates are proportions in [0, 1]; ``response`` may be filled by
    :func:`simulate_responses` or loaded from a long-format table.
    """

    participant: tuple
    item: tuple
    x_blue: np.ndarray
    x_hidden: np.ndarray
    x_disc: np.ndarray
    response: np.ndarray | None = None
    clamped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "participant", tuple(self.participant))
        object.__setattr__(self, "item", tuple(self.item))
        for name in ("x_blue", "x_hidden", "x_disc"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.size != len(self.participant):
                raise ValueError(f"{name} must be one value per observation")
            if np.any((arr < 0) | (arr > 1)):
                raise ValueError(f"{name} values must be proportions in [0, 1]")
        if len(self.item) != len(self.participant):
            raise ValueError("participant and item must be the same length")
        if self.response is not None:
            resp = np.asarray(self.response, dtype=float)
            if resp.shape != (len(self.participant),):
                raise ValueError("response must be one value per observation")
            object.__setattr__(self, "response", resp)

    @property
    def n_obs(self) -> int:
        return len(self.participant)

    def design_matrix(self) -> np.ndarray:
        xb, xh, xd = self.x_blue, self.x_hidden, self.x_disc
        return np.column_stack(
            [np.ones(self.n_obs), xb, xh, xd, xb * xh, xb * xd, xd * xh]
        )

    def to_table(self) -> str:
        lines = ["participant,item,xB,xH,xD,response"]
        y = self.response
        for i in range(self.n_obs):
            resp = "" if y is None else repr(float(y[i]))
            lines.append(
                f"{self.participant[i]},{self.item[i]},{float(self.x_blue[i])!r},"
                f"{float(self.x_hidden[i])!r},{float(self.x_disc[i])!r},{resp}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_table(cls, source: str | Path) -> "MixedModelSpec":
        with open(source, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
        return cls(
            participant=tuple(r["participant"] for r in rows),
            item=tuple(r["item"] for r in rows),
            x_blue=np.array([float(r["xB"]) for r in rows]),
            x_hidden=np.array([float(r["xH"]) for r in rows]),
            x_disc=np.array([float(r["xD"]) for r in rows]),
            response=np.array([float(r["response"]) for r in rows]),
        )


@dataclass(frozen=True)
class FixedEffect:
    name: str
    estimate: float
    se: float
    ci_lo: float
    ci_hi: float
    t: float
    p: float


@dataclass(frozen=True)
class MixedModelFit:
    effects: tuple[FixedEffect, ...]
    vc: VarianceComponents
    boundary: tuple[str, ...]
    reml_loglik: float
    aic: float
    bic: float
    n_obs: int
    converged: bool
    iterations: int

    def effect(self, name: str) -> FixedEffect:
        for e in self.effects:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_rows(self) -> list[tuple]:
        """Serialize fixed effects, then variance components, then fit info."""
        rows: list[tuple] = [("term", "estimate", "se", "ci_lo", "ci_hi", "t", "p")]
        for e in self.effects:
            rows.append((e.name, e.estimate, e.se, e.ci_lo, e.ci_hi, e.t, e.p))
        rows.append(("sigma_participant", self.vc.sigma_participant, "", "", "", "", ""))
        rows.append(("sigma_item", self.vc.sigma_item, "", "", "", "", ""))
        rows.append(("sigma_resid", self.vc.sigma_resid, "", "", "", "", ""))
        rows.append(("n_obs", self.n_obs, "", "", "", "", ""))
        rows.append(("aic", self.aic, "", "", "", "", ""))
        rows.append(("bic", self.bic, "", "", "", "", ""))
        return rows


class _REMLWorkspace:
    """Pre-factorized cross-products for fast restricted log-likelihood."""

    def __init__(self, spec: MixedModelSpec):
        if spec.response is None:
            raise ValueError("spec has no response values")
        y = spec.response
        X = spec.design_matrix()
        n, p = X.shape
        if n <= p:
            raise ValueError("need more observations than fixed effects")
        if np.linalg.matrix_rank(X) < p:
            raise np.linalg.LinAlgError("fixed-effect design is rank deficient")

        # canonical observation order: results do not depend on input order
        p_levels, p_codes = np.unique(np.asarray(spec.participant, dtype=object), return_inverse=True)
        q_levels, q_codes = np.unique(np.asarray(spec.item, dtype=object), return_inverse=True)
        order = np.lexsort((y, *X.T[::-1], q_codes, p_codes))
        X, y = X[order], y[order]
        p_codes, q_codes = p_codes[order], q_codes[order]

        self.n, self.p = n, p
        self.P, self.Q = len(p_levels), len(q_levels)
        m = self.P + self.Q
        Z = np.zeros((n, m))
        Z[np.arange(n), p_codes] = 1.0
        Z[np.arange(n), self.P + q_codes] = 1.0
        self.is_participant = np.arange(m) < self.P

        self.XtX = X.T @ X
        self.Xty = X.T @ y
        self.yty = float(y @ y)
        self.ZtX = Z.T @ X
        self.Zty = Z.T @ y
        self.ZtZ = Z.T @ Z

    def _whitened_crossproducts(self, gamma_p: float, gamma_q: float):
        """Cross products through V0^-1 where V0 = I + G Z Z' G, G = diag(gamma).

        gamma are the random-effect standard deviations as ratios to the
        residual standard deviation; V = sigma_r^2 V0.
        """
        g = np.where(self.is_participant, gamma_p, gamma_q)
        inner = np.eye(self.P + self.Q) + g[:, None] * self.ZtZ * g[None, :]
        chol = np.linalg.cholesky(inner)
        logdet_v0 = 2.0 * float(np.sum(np.log(np.diag(chol))))
        sol_x = np.linalg.solve(chol, g[:, None] * self.ZtX)
        sol_y = np.linalg.solve(chol, g * self.Zty)
        xtv0x = self.XtX - sol_x.T @ sol_x
        xtv0y = self.Xty - sol_x.T @ sol_y
        ytv0y = self.yty - float(sol_y @ sol_y)
        return logdet_v0, xtv0x, xtv0y, ytv0y

    def loglik(self, sigma_p: float, sigma_q: float, sigma_r: float) -> float:
        if not sigma_r > 0:
            raise ValueError("residual standard deviation must be positive")
        n, p = self.n, self.p
        r2 = sigma_r * sigma_r
        try:
            logdet_v0, xtv0x, xtv0y, ytv0y = self._whitened_crossproducts(
                sigma_p / sigma_r, sigma_q / sigma_r
            )
            chol_a = np.linalg.cholesky(xtv0x)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "marginal covariance numerically non-positive-definite at "
                f"({sigma_p}, {sigma_q}, {sigma_r})"
            ) from exc
        logdet_a0 = 2.0 * float(np.sum(np.log(np.diag(chol_a))))
        beta = np.linalg.solve(xtv0x, xtv0y)
        quad0 = max(ytv0y - float(xtv0y @ beta), 0.0)
        # log|V| = n log r2 + log|V0|; log|X'V^-1 X| = log|X'V0^-1 X| - p log r2
        return -0.5 * (
            (n - p) * math.log(2.0 * math.pi)
            + (n - p) * math.log(r2)
            + logdet_v0
            + logdet_a0
            + quad0 / r2
        )

    def profiled_loglik(self, gamma_p: float, gamma_q: float) -> tuple[float, float]:
        """Max over sigma_r of the restricted log-likelihood at fixed ratios.

        Returns (log-likelihood, maximizing sigma_r); the inner maximum is
        the closed form sigma_r^2 = r' V0^-1 r / (n - p).
        """
        n, p = self.n, self.p
        logdet_v0, xtv0x, xtv0y, ytv0y = self._whitened_crossproducts(gamma_p, gamma_q)
        chol_a = np.linalg.cholesky(xtv0x)
        logdet_a0 = 2.0 * float(np.sum(np.log(np.diag(chol_a))))
        beta = np.linalg.solve(xtv0x, xtv0y)
        quad0 = max(ytv0y - float(xtv0y @ beta), 0.0)
        r2 = max(quad0 / (n - p), 1e-300)
        ll = -0.5 * (
            (n - p) * (math.log(2.0 * math.pi) + math.log(r2) + 1.0)
            + logdet_v0
            + logdet_a0
        )
        return ll, math.sqrt(r2)

    def gls(self, sigma_p: float, sigma_q: float, sigma_r: float):
        """(beta, covariance of beta) at the given variance components."""
        r2 = sigma_r * sigma_r
        _, xtv0x, xtv0y, _ = self._whitened_crossproducts(sigma_p / sigma_r, sigma_q / sigma_r)
        cov = np.linalg.inv(xtv0x) * r2
        return np.linalg.solve(xtv0x, xtv0y), cov


def reml_loglik(vc: VarianceComponents, spec: MixedModelSpec) -> float:
    """Restricted log-likelihood of the observed responses at the given components.

    Exact (to linear-algebra precision), usable both as the optimization
    objective and as a comparison target for independent implementations.
    """
    return _REMLWorkspace(spec).loglik(vc.sigma_participant, vc.sigma_item, vc.sigma_resid)


def information_criteria(fit: MixedModelFit) -> tuple[float, float]:
    """(AIC, BIC) from the restricted log-likelihood.

    The parameter count is the number of fixed effects plus the three
    variance components.
    """
    k = len(fit.effects) + 3
    aic = -2.0 * fit.reml_loglik + 2.0 * k
    bic = -2.0 * fit.reml_loglik + k * math.log(fit.n_obs)
    return aic, bic


def fit_reml(
    spec: MixedModelSpec, tol: float = 1e-10, max_iter: int = 2000
) -> MixedModelFit:
    """Fit the crossed-intercepts model by maximizing the restricted likelihood.

    The three standard deviations are searched in log space (guaranteeing
    nonnegativity); estimates that collapse below 1e-8 are reported as 0
    with a boundary flag. Raises :class:`ConvergenceError`, carrying the
    best fit found, if the simplex search exhausts ``max_iter``.
    """
    ws = _REMLWorkspace(spec)

    # The residual scale has a closed-form inner maximum, so the simplex
    # searches only the two log variance ratios (sigma_p/sigma_r,
    # sigma_q/sigma_r); regions where the whitened system loses positive
    # definiteness (extreme ratios) are treated as infeasible.
    def objective(theta: np.ndarray) -> float:
        gp, gq = np.exp(np.clip(theta, -_LOG_SIGMA_BOUND, _LOG_SIGMA_BOUND))
        try:
            ll, _ = ws.profiled_loglik(gp, gq)
        except np.linalg.LinAlgError:
            return math.inf
        return -ll

    start = np.log([0.5, 0.5])
    first = nelder_mead(objective, start, ftol=tol, xtol=1e-8, max_iter=max_iter)
    second = nelder_mead(
        objective,
        first.x + np.array([0.5, -0.5]),
        ftol=tol,
        xtol=1e-8,
        max_iter=max_iter,
    )
    best = first if first.fx <= second.fx else second

    gp, gq = np.exp(np.clip(best.x, -_LOG_SIGMA_BOUND, _LOG_SIGMA_BOUND))
    _, sr = ws.profiled_loglik(gp, gq)
    sp, sq = gp * sr, gq * sr
    boundary = tuple(
        name
        for name, value in (("sigma_participant", sp), ("sigma_item", sq))
        if value < 1e-8
    )
    vc = VarianceComponents(
        sigma_participant=0.0 if sp < 1e-8 else float(sp),
        sigma_item=0.0 if sq < 1e-8 else float(sq),
        sigma_resid=float(sr),
    )

    beta, cov = ws.gls(sp, sq, sr)
    se = np.sqrt(np.diag(cov))
    df = ws.n - ws.p
    t_vals = beta / se
    p_vals = 2.0 * stats.t.sf(np.abs(t_vals), df)
    t_crit = float(stats.t.ppf(0.975, df))
    effects = tuple(
        FixedEffect(
            name=FIXED_EFFECT_NAMES[i],
            estimate=float(beta[i]),
            se=float(se[i]),
            ci_lo=float(beta[i] - t_crit * se[i]),
            ci_hi=float(beta[i] + t_crit * se[i]),
            t=float(t_vals[i]),
            p=float(p_vals[i]),
        )
        for i in range(ws.p)
    )
    loglik = -best.fx
    fit = MixedModelFit(
        effects=effects,
        vc=vc,
        boundary=boundary,
        reml_loglik=loglik,
        aic=0.0,
        bic=0.0,
        n_obs=ws.n,
        converged=best.converged,
        iterations=first.iterations + second.iterations,
    )
    aic, bic = information_criteria(fit)
    fit = replace(fit, aic=aic, bic=bic)
    if not best.converged:
        raise ConvergenceError(
            f"REML simplex search did not converge within {max_iter} iterations", best=fit
        )
    return fit


def simulate_responses(
    b: Sequence[float],
    vc: VarianceComponents,
    n_participants: int,
    items: Sequence[tuple[float, float, float]],
    seed: int = 0,
    clamp: bool = False,
) -> MixedModelSpec:
    """Draw a complete crossed dataset from the generative model.

    ``items`` lists per-item covariates (blue-visible, hidden,
    discrepancy proportions); every participant responds to every item.
    With ``clamp=True`` the responses are truncated into [0, 1] and the
    returned spec is flagged accordingly.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (len(FIXED_EFFECT_NAMES),):
        raise ValueError(f"expected {len(FIXED_EFFECT_NAMES)} coefficients, got {b.shape}")
    item_arr = np.asarray(items, dtype=float)
    if item_arr.ndim != 2 or item_arr.shape[1] != 3:
        raise ValueError("items must be (xB, xH, xD) triples")
    n_items = item_arr.shape[0]
    pid = np.repeat(np.arange(n_participants), n_items)
    qid = np.tile(np.arange(n_items), n_participants)

    rng = np.random.default_rng(seed)
    mu_p = rng.normal(0.0, vc.sigma_participant, size=n_participants)
    mu_q = rng.normal(0.0, vc.sigma_item, size=n_items)
    eps = rng.normal(0.0, vc.sigma_resid, size=pid.size)

    xb, xh, xd = (item_arr[qid, i] for i in range(3))
    X = np.column_stack([np.ones(pid.size), xb, xh, xd, xb * xh, xb * xd, xd * xh])
    y = X @ b + mu_p[pid] + mu_q[qid] + eps
    if clamp:
        y = np.clip(y, 0.0, 1.0)
    width = len(str(max(n_participants - 1, 1)))
    iwidth = len(str(max(n_items - 1, 1)))
    return MixedModelSpec(
        participant=tuple(f"p{i:0{width}d}" for i in pid),
        item=tuple(f"i{j:0{iwidth}d}" for j in qid),
        x_blue=xb,
        x_hidden=xh,
        x_disc=xd,
        response=y,
        clamped=clamp,
    )


def vc_confints(
    spec: MixedModelSpec,
    fit: MixedModelFit,
    refits: int = 200,
    seed: int = 0,
    level: float = 0.95,
) -> dict[str, tuple[float, float]]:
    """Approximate parametric-bootstrap confidence intervals for the
    variance components: simulate at the fitted parameters, refit, and take
    percentile intervals of the refitted standard deviations."""
    items, first_seen = [], {}
    for label, xb, xh, xd in zip(spec.item, spec.x_blue, spec.x_hidden, spec.x_disc):
        if label not in first_seen:
            first_seen[label] = True
            items.append((xb, xh, xd))
    n_participants = len(set(spec.participant))
    b = np.array([e.estimate for e in fit.effects])
    seeds = np.random.SeedSequence(seed).spawn(refits)
    draws = {"sigma_participant": [], "sigma_item": [], "sigma_resid": []}
    for child in seeds:
        rep_seed = int(child.generate_state(1)[0])
        sim = simulate_responses(b, fit.vc, n_participants, items, seed=rep_seed)
        try:
            refit = fit_reml(sim)
        except ConvergenceError as exc:  # keep best-effort refits in the sample
            if exc.best is None:
                continue
            refit = exc.best
        draws["sigma_participant"].append(refit.vc.sigma_participant)
        draws["sigma_item"].append(refit.vc.sigma_item)
        draws["sigma_resid"].append(refit.vc.sigma_resid)
    alpha = (1.0 - level) / 2.0
    return {
        name: tuple(float(v) for v in np.percentile(values, [100 * alpha, 100 * (1 - alpha)]))
        for name, values in draws.items()
    }
