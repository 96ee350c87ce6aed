"""Repeated-measures ANOVA with sphericity-corrected degrees of freedom,
partial eta-squared effect sizes, and Monte-Carlo permutation checks.

One-way designs decompose an n x k matrix (subjects x conditions) into
subject, condition, and subject-by-condition error sums of squares; the
F ratio is tested at Greenhouse-Geisser corrected degrees of freedom
(epsilon times the uncorrected dfs). Two-way designs test each effect
against its own subject-interaction error term with a per-effect epsilon.

The permutation check rebuilds the null by shuffling condition labels
within each subject (whole cell-label vectors for factorial designs),
which preserves subject totals, and reports add-one smoothed p-values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .bootstrap import TestResult, bootstrap_one_sample_t


class DesignError(ValueError):
    """Incomplete or too-small repeated-measures design."""


class UndefinedFError(ZeroDivisionError):
    """Zero effect variance together with zero error variance."""


@dataclass(frozen=True)
class RMDesign:
    """A complete within-subject design: data indexed (subject, level...)."""

    data: np.ndarray
    factor_names: tuple[str, ...] = ("condition",)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        object.__setattr__(self, "data", arr)
        if arr.ndim not in (2, 3):
            raise DesignError("data must be (subjects x levels) or (subjects x a x b)")
        if len(self.factor_names) != arr.ndim - 1:
            raise DesignError("one factor name required per within-subject dimension")
        if arr.shape[0] < 2:
            raise DesignError("need at least two subjects")
        if any(k < 2 for k in arr.shape[1:]):
            raise DesignError("every factor needs at least two levels")
        if not np.all(np.isfinite(arr)):
            raise DesignError("design matrix must be complete (finite, no missing cells)")

    @property
    def n_subjects(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class AnovaRow:
    effect: str
    ss_effect: float
    ss_error: float
    df1: float
    df2: float
    epsilon: float
    df1_corrected: float
    df2_corrected: float
    F: float
    p: float
    eta_p_sq: float


@dataclass(frozen=True)
class AnovaTable:
    rows: tuple[AnovaRow, ...]

    def row(self, effect: str) -> AnovaRow:
        for r in self.rows:
            if r.effect == effect:
                return r
        raise KeyError(effect)

    def to_csv(self) -> str:
        lines = ["effect,F,df1,df2,p,eta_p_sq"]
        for r in self.rows:
            cells = (r.F, r.df1_corrected, r.df2_corrected, r.p, r.eta_p_sq)
            lines.append(r.effect + "," + ",".join(repr(float(v)) for v in cells))
        return "\n".join(lines) + "\n"


def gg_epsilon(sample_covariance: np.ndarray) -> float:
    """Greenhouse-Geisser sphericity correction from a k x k covariance.

    Double-centers the covariance and computes
    ``(sum of eigenvalues)^2 / ((k-1) * sum of squared eigenvalues)``,
    clamped to [1/(k-1), 1]. Equals 1 under compound symmetry and the
    lower bound when a single contrast carries all variance.
    """
    S = np.asarray(sample_covariance, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("covariance must be square")
    k = S.shape[0]
    if k < 2:
        raise ValueError("need at least two levels")
    if not np.allclose(S, S.T, rtol=1e-10, atol=1e-12):
        raise ValueError("covariance must be symmetric")
    centering = np.eye(k) - np.full((k, k), 1.0 / k)
    centered = centering @ S @ centering
    lam = np.linalg.eigvalsh(centered)
    denom = (k - 1) * float(np.sum(lam**2))
    if denom == 0.0:
        return 1.0  # no contrast variance at all; sphericity holds trivially
    eps = float(np.sum(lam)) ** 2 / denom
    return float(min(max(eps, 1.0 / (k - 1)), 1.0))


def _epsilon_from_eigs(sigma_eff: np.ndarray, d: int) -> float:
    lam = np.linalg.eigvalsh(sigma_eff)
    denom = d * float(np.sum(lam**2))
    if denom == 0.0:
        return 1.0
    eps = float(np.sum(lam)) ** 2 / denom
    return float(min(max(eps, 1.0 / d), 1.0))


def _orthonormal_contrasts(k: int) -> np.ndarray:
    """k x (k-1) orthonormal basis of the centered (contrast) subspace."""
    centering = np.eye(k) - np.full((k, k), 1.0 / k)
    # eigenvectors of the centering projector with unit eigenvalue
    vals, vecs = np.linalg.eigh(centering)
    return vecs[:, vals > 0.5]


_DUST = 1e-12  # relative threshold below which a sum of squares counts as zero


def _variance_floor(data: np.ndarray) -> float:
    """Total-SS level below which the data count as constant."""
    grand = float(data.mean())
    return _DUST * data.size * (1.0 + grand * grand)


def _f_and_p(ss_eff, ss_err, df1, df2, eps, ss_total, const_floor):
    """(F, p, partial eta squared) with explicit degenerate-variance rules.

    Data with no variance at all cannot be tested; a zero effect SS yields
    F = 0, p = 1 (identical conditions per subject are a legitimate "no
    effect" observation); a zero error SS under a real effect leaves the
    F ratio undefined.
    """
    if ss_total <= const_floor:
        raise UndefinedFError("zero effect variance with zero error variance")
    zero_eff = ss_eff <= _DUST * ss_total
    zero_err = ss_err <= _DUST * ss_total
    if zero_eff:
        return 0.0, 1.0, 0.0
    if zero_err:
        raise UndefinedFError("zero error variance with nonzero effect variance")
    F = (ss_eff / df1) / (ss_err / df2)
    p = float(stats.f.sf(F, eps * df1, eps * df2))
    return F, p, ss_eff / (ss_eff + ss_err)


def _oneway_ss(data: np.ndarray) -> tuple[float, float]:
    """(condition SS, subject x condition error SS) for an n x k matrix."""
    n, k = data.shape
    grand = data.mean()
    subj_means = data.mean(axis=1)
    cond_means = data.mean(axis=0)
    ss_cond = n * float(np.sum((cond_means - grand) ** 2))
    resid = data - subj_means[:, None] - cond_means[None, :] + grand
    ss_err = float(np.sum(resid**2))
    return ss_cond, ss_err


def rm_anova_oneway(design: RMDesign | np.ndarray, *, epsilon: float | None = None) -> AnovaTable:
    """One-way repeated-measures ANOVA on an n x k matrix.

    ``epsilon`` overrides the Greenhouse-Geisser estimate (useful for
    checking corrected-df arithmetic against published values); by default
    it is estimated from the sample covariance of the conditions.
    """
    if not isinstance(design, RMDesign):
        design = RMDesign(np.asarray(design, dtype=float))
    data = design.data
    if data.ndim != 2:
        raise DesignError("one-way ANOVA expects a 2-d (subjects x levels) design")
    n, k = data.shape
    ss_cond, ss_err = _oneway_ss(data)
    ss_total = float(((data - data.mean()) ** 2).sum())
    df1, df2 = k - 1.0, (n - 1.0) * (k - 1.0)
    eps = gg_epsilon(np.cov(data, rowvar=False, ddof=1)) if epsilon is None else float(epsilon)
    F, p, eta = _f_and_p(ss_cond, ss_err, df1, df2, eps, ss_total, _variance_floor(data))
    row = AnovaRow(
        effect=design.factor_names[0],
        ss_effect=ss_cond,
        ss_error=ss_err,
        df1=df1,
        df2=df2,
        epsilon=eps,
        df1_corrected=eps * df1,
        df2_corrected=eps * df2,
        F=F,
        p=p,
        eta_p_sq=eta,
    )
    return AnovaTable(rows=(row,))


def _factorial_ss(data: np.ndarray) -> dict[str, tuple[float, float]]:
    """Effect and error SS for each of A, B, AxB in an n x a x b array."""
    n, a, b = data.shape
    grand = data.mean()
    m_s = data.mean(axis=(1, 2))
    m_a = data.mean(axis=(0, 2))
    m_b = data.mean(axis=(0, 1))
    m_sa = data.mean(axis=2)
    m_sb = data.mean(axis=1)
    m_ab = data.mean(axis=0)

    ss_a = n * b * float(np.sum((m_a - grand) ** 2))
    ss_b = n * a * float(np.sum((m_b - grand) ** 2))
    dev_ab = m_ab - m_a[:, None] - m_b[None, :] + grand
    ss_ab = n * float(np.sum(dev_ab**2))

    dev_sa = m_sa - m_s[:, None] - m_a[None, :] + grand
    ss_err_a = b * float(np.sum(dev_sa**2))
    dev_sb = m_sb - m_s[:, None] - m_b[None, :] + grand
    ss_err_b = a * float(np.sum(dev_sb**2))

    resid = (
        data
        - m_sa[:, :, None]
        - m_sb[:, None, :]
        - m_ab[None, :, :]
        + m_s[:, None, None]
        + m_a[None, :, None]
        + m_b[None, None, :]
        - grand
    )
    ss_err_ab = float(np.sum(resid**2))
    return {"A": (ss_a, ss_err_a), "B": (ss_b, ss_err_b), "AxB": (ss_ab, ss_err_ab)}


def rm_anova_factorial(
    design: RMDesign | np.ndarray, *, epsilon: Mapping[str, float] | None = None
) -> AnovaTable:
    """Two-way repeated-measures factorial ANOVA on an n x a x b array.

    Each effect (A, B, and the interaction) is tested against its own
    subject-interaction error term, with a per-effect sphericity
    correction estimated from the matching contrast covariance.
    """
    if not isinstance(design, RMDesign):
        arr = np.asarray(design, dtype=float)
        design = RMDesign(arr, factor_names=("A", "B"))
    data = design.data
    if data.ndim != 3:
        raise DesignError("factorial ANOVA expects a 3-d (subjects x a x b) design")
    n, a, b = data.shape
    name_a, name_b = design.factor_names
    ss = _factorial_ss(data)

    flat_cov = np.cov(data.reshape(n, a * b), rowvar=False, ddof=1)
    q_a = _orthonormal_contrasts(a)
    q_b = _orthonormal_contrasts(b)
    ones_a = np.full((a, 1), 1.0 / a)
    ones_b = np.full((b, 1), 1.0 / b)
    contrast_maps = {
        "A": (np.kron(q_a, ones_b), a - 1),
        "B": (np.kron(ones_a, q_b), b - 1),
        "AxB": (np.kron(q_a, q_b), (a - 1) * (b - 1)),
    }
    dfs = {
        "A": (a - 1.0, (a - 1.0) * (n - 1.0)),
        "B": (b - 1.0, (b - 1.0) * (n - 1.0)),
        "AxB": ((a - 1.0) * (b - 1.0), (a - 1.0) * (b - 1.0) * (n - 1.0)),
    }
    labels = {"A": name_a, "B": name_b, "AxB": f"{name_a}:{name_b}"}

    ss_total = float(((data - data.mean()) ** 2).sum())
    const_floor = _variance_floor(data)
    rows = []
    for key in ("A", "B", "AxB"):
        ss_eff, ss_err = ss[key]
        df1, df2 = dfs[key]
        if epsilon is not None and key in epsilon:
            eps = float(epsilon[key])
        else:
            M, d = contrast_maps[key]
            eps = _epsilon_from_eigs(M.T @ flat_cov @ M, d)
        F, p, eta = _f_and_p(ss_eff, ss_err, df1, df2, eps, ss_total, const_floor)
        rows.append(
            AnovaRow(
                effect=labels[key],
                ss_effect=ss_eff,
                ss_error=ss_err,
                df1=df1,
                df2=df2,
                epsilon=eps,
                df1_corrected=eps * df1,
                df2_corrected=eps * df2,
                F=F,
                p=p,
                eta_p_sq=eta,
            )
        )
    return AnovaTable(rows=tuple(rows))


def _oneway_f_many(data3: np.ndarray) -> np.ndarray:
    """Vectorized one-way F over a stack of (m, n, k) permuted datasets."""
    m, n, k = data3.shape
    grand = data3.mean(axis=(1, 2), keepdims=True)
    subj = data3.mean(axis=2, keepdims=True)
    cond = data3.mean(axis=1, keepdims=True)
    ss_cond = n * np.sum((cond - grand) ** 2, axis=(1, 2))
    resid = data3 - subj - cond + grand
    ss_err = np.sum(resid**2, axis=(1, 2))
    df1, df2 = k - 1.0, (n - 1.0) * (k - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (ss_cond / df1) / (ss_err / df2)
    return np.where(np.isnan(f), 0.0, f)


def _factorial_f_many(data4: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorized factorial F per effect over (m, n, a, b) permuted stacks."""
    m, n, a, b = data4.shape
    grand = data4.mean(axis=(1, 2, 3), keepdims=True)
    m_s = data4.mean(axis=(2, 3), keepdims=True)
    m_a = data4.mean(axis=(1, 3), keepdims=True)
    m_b = data4.mean(axis=(1, 2), keepdims=True)
    m_sa = data4.mean(axis=3, keepdims=True)
    m_sb = data4.mean(axis=2, keepdims=True)
    m_ab = data4.mean(axis=1, keepdims=True)

    ss_a = n * b * np.sum((m_a - grand) ** 2, axis=(1, 2, 3))
    ss_b = n * a * np.sum((m_b - grand) ** 2, axis=(1, 2, 3))
    ss_ab = n * np.sum((m_ab - m_a - m_b + grand) ** 2, axis=(1, 2, 3))
    ss_err_a = b * np.sum((m_sa - m_s - m_a + grand) ** 2, axis=(1, 2, 3))
    ss_err_b = a * np.sum((m_sb - m_s - m_b + grand) ** 2, axis=(1, 2, 3))
    resid = data4 - m_sa - m_sb - m_ab + m_s + m_a + m_b - grand
    ss_err_ab = np.sum(resid**2, axis=(1, 2, 3))

    out = {}
    specs = {
        "A": (ss_a, ss_err_a, a - 1.0, (a - 1.0) * (n - 1.0)),
        "B": (ss_b, ss_err_b, b - 1.0, (b - 1.0) * (n - 1.0)),
        "AxB": (ss_ab, ss_err_ab, (a - 1.0) * (b - 1.0), (a - 1.0) * (b - 1.0) * (n - 1.0)),
    }
    for key, (ss_eff, ss_err, df1, df2) in specs.items():
        with np.errstate(divide="ignore", invalid="ignore"):
            f = (ss_eff / df1) / (ss_err / df2)
        out[key] = np.where(np.isnan(f), 0.0, f)
    return out


def mc_anova(
    design: RMDesign | np.ndarray, M: int = 10_000, seed: int = 0, _chunk: int = 2048
) -> dict[str, float]:
    """Monte-Carlo permutation p-values for each ANOVA effect.

    Condition labels are permuted independently within every subject (for
    factorial designs the whole cell-label vector is permuted), the F
    statistic is recomputed per resample, and each effect's p-value is
    ``(1 + #{F* >= F_obs}) / (M + 1)``.
    """
    if not isinstance(design, RMDesign):
        arr = np.asarray(design, dtype=float)
        names = ("condition",) if arr.ndim == 2 else ("A", "B")
        design = RMDesign(arr, factor_names=names)
    if M < 1:
        raise ValueError("M must be >= 1")
    data = design.data
    n = design.n_subjects
    rng = np.random.default_rng(seed)

    if data.ndim == 2:
        k = data.shape[1]
        ss_cond, ss_err = _oneway_ss(data)
        ss_total = float(((data - data.mean()) ** 2).sum())
        f_obs, _, _ = _f_and_p(
            ss_cond, ss_err, k - 1.0, (n - 1.0) * (k - 1.0), 1.0,
            ss_total, _variance_floor(data),
        )
        exceed = 0
        done = 0
        while done < M:
            m = min(_chunk, M - done)
            perm = rng.permuted(np.broadcast_to(np.arange(k), (m, n, k)), axis=2)
            exceed += int(np.count_nonzero(_oneway_f_many(np.take_along_axis(data[None], perm, 2)) >= f_obs))
            done += m
        return {design.factor_names[0]: (1 + exceed) / (M + 1)}

    n, a, b = data.shape
    flat = data.reshape(n, a * b)
    f_obs = {k: v[0] for k, v in _factorial_f_many(data[None]).items()}
    exceed = {k: 0 for k in f_obs}
    done = 0
    while done < M:
        m = min(_chunk, M - done)
        perm = rng.permuted(np.broadcast_to(np.arange(a * b), (m, n, a * b)), axis=2)
        permuted = np.take_along_axis(np.broadcast_to(flat, (m, n, a * b)), perm, axis=2)
        f_star = _factorial_f_many(permuted.reshape(m, n, a, b))
        for key in exceed:
            exceed[key] += int(np.count_nonzero(f_star[key] >= f_obs[key]))
        done += m
    name_a, name_b = design.factor_names
    labels = {"A": name_a, "B": name_b, "AxB": f"{name_a}:{name_b}"}
    return {labels[key]: (1 + exceed[key]) / (M + 1) for key in ("A", "B", "AxB")}


def one_sample_scale_midpoint_test(
    values: Sequence[float], mu0: float = 3.0, B: int = 10_000, seed: int = 0
) -> TestResult:
    """Bootstrap test of ordinal feedback means against the scale midpoint."""
    return bootstrap_one_sample_t(values, mu0=mu0, B=B, seed=seed)
