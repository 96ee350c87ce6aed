import dataclasses
import math

import numpy as np
import pytest

from ivsurvey import fixtures
from ivsurvey.mixedmodel import (
    FIXED_EFFECT_NAMES,
    ConvergenceError,
    MixedModelSpec,
    VarianceComponents,
    fit_reml,
    information_criteria,
    reml_loglik,
    simulate_responses,
    vc_confints,
)

PUBLISHED_MIDPOINT_B = np.array([0.006, 0.979, 0.494, 0.389, -0.985, -0.472, -0.145])
PUBLISHED_MIDPOINT_VC = VarianceComponents(0.018, 0.008, 0.089)


def dense_restricted_loglik(spec, sp, sq, sr):
    """Independent oracle: explicit n x n marginal covariance."""
    y = spec.response
    X = spec.design_matrix()
    n, p = X.shape
    _, p_codes = np.unique(np.asarray(spec.participant, dtype=object), return_inverse=True)
    _, q_codes = np.unique(np.asarray(spec.item, dtype=object), return_inverse=True)
    Zp = np.zeros((n, p_codes.max() + 1))
    Zp[np.arange(n), p_codes] = 1.0
    Zq = np.zeros((n, q_codes.max() + 1))
    Zq[np.arange(n), q_codes] = 1.0
    V = sp**2 * Zp @ Zp.T + sq**2 * Zq @ Zq.T + sr**2 * np.eye(n)
    Vi = np.linalg.inv(V)
    A = X.T @ Vi @ X
    beta = np.linalg.solve(A, X.T @ Vi @ y)
    r = y - X @ beta
    _, ld_v = np.linalg.slogdet(V)
    _, ld_a = np.linalg.slogdet(A)
    return -0.5 * ((n - p) * math.log(2 * math.pi) + ld_v + ld_a + float(r @ Vi @ r))


def random_spec(rng, n_min=15, n_max=30):
    n = int(rng.integers(n_min, n_max + 1))
    n_p, n_q = int(rng.integers(2, 6)), int(rng.integers(2, 5))
    return MixedModelSpec(
        participant=tuple(f"p{int(v)}" for v in rng.integers(0, n_p, n)),
        item=tuple(f"i{int(v)}" for v in rng.integers(0, n_q, n)),
        x_blue=rng.uniform(0, 1, n),
        x_hidden=rng.uniform(0, 1, n),
        x_disc=rng.uniform(0, 1, n),
        response=rng.normal(0, 1, n),
    )


def grid_items(n_b=3):
    return [
        (xb, xh, xd)
        for xh in (0.0, 3 / 7, 6 / 7)
        for xb in np.linspace(0.1, 0.9, n_b)
        for xd in (0.0, 3 / 7)
    ]


class TestRemlLoglik:
    def test_matches_dense_oracle_on_toys(self):
        rng = np.random.default_rng(1001)
        for _ in range(15):
            spec = random_spec(rng)
            vc = VarianceComponents(
                rng.uniform(0, 0.5), rng.uniform(0, 0.5), rng.uniform(0.05, 1.0)
            )
            fast = reml_loglik(vc, spec)
            dense = dense_restricted_loglik(
                spec, vc.sigma_participant, vc.sigma_item, vc.sigma_resid
            )
            assert fast == pytest.approx(dense, abs=1e-8)

    def test_zero_random_effects_equals_ols_form(self):
        rng = np.random.default_rng(1002)
        spec = random_spec(rng)
        X, y = spec.design_matrix(), spec.response
        n, p = X.shape
        beta = np.linalg.lstsq(X, y, rcond=None)[0]
        rss = float(((y - X @ beta) ** 2).sum())
        s2 = 0.3**2
        expected = -0.5 * (
            (n - p) * math.log(2 * math.pi)
            + n * math.log(s2)
            + np.linalg.slogdet(X.T @ X / s2)[1]
            + rss / s2
        )
        assert reml_loglik(VarianceComponents(0, 0, 0.3), spec) == pytest.approx(
            expected, abs=1e-9
        )

    def test_scaling_shifts_by_n_minus_p_log_c(self):
        rng = np.random.default_rng(1003)
        spec = random_spec(rng)
        c = 3.7
        scaled = dataclasses.replace(spec, response=spec.response * c)
        base = reml_loglik(VarianceComponents(0.1, 0.2, 0.4), spec)
        shifted = reml_loglik(VarianceComponents(0.1 * c, 0.2 * c, 0.4 * c), scaled)
        n, p = spec.n_obs, 7
        assert shifted - base == pytest.approx(-(n - p) * math.log(c), abs=1e-8)

    def test_rank_deficient_design_rejected(self):
        rng = np.random.default_rng(1004)
        n = 20
        spec = MixedModelSpec(
            participant=tuple(f"p{i % 4}" for i in range(n)),
            item=tuple(f"i{i % 3}" for i in range(n)),
            x_blue=np.full(n, 0.5),  # constant column collides with intercept
            x_hidden=np.full(n, 0.25),
            x_disc=rng.uniform(0, 1, n),
            response=rng.normal(size=n),
        )
        with pytest.raises(np.linalg.LinAlgError):
            reml_loglik(VarianceComponents(0.1, 0.1, 0.5), spec)

    def test_invalid_variance_components_rejected(self):
        with pytest.raises(ValueError):
            VarianceComponents(-0.1, 0.1, 0.5)
        with pytest.raises(ValueError):
            VarianceComponents(0.1, 0.1, 0.0)


class TestFitReml:
    def test_noiseless_recovery(self):
        items = grid_items()
        spec = simulate_responses(
            PUBLISHED_MIDPOINT_B, VarianceComponents(0, 0, 1e-9), 8, items, seed=4
        )
        spec = dataclasses.replace(spec, response=spec.design_matrix() @ PUBLISHED_MIDPOINT_B)
        fit = fit_reml(spec)
        for effect, truth in zip(fit.effects, PUBLISHED_MIDPOINT_B):
            assert effect.estimate == pytest.approx(truth, abs=1e-6)
        assert fit.vc.sigma_participant == 0.0
        assert fit.vc.sigma_item == 0.0
        assert fit.vc.sigma_resid < 1e-6
        assert "sigma_participant" in fit.boundary

    def test_estimates_near_truth_for_realistic_sim(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 40, items, seed=5)
        fit = fit_reml(spec)
        assert fit.converged
        for effect, truth in zip(fit.effects, PUBLISHED_MIDPOINT_B):
            assert abs(effect.estimate - truth) < 5 * max(effect.se, 1e-3)
        assert fit.vc.sigma_resid == pytest.approx(0.089, rel=0.15)

    def test_order_invariance_bitwise(self):
        rng = np.random.default_rng(1005)
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 10, items, seed=6)
        perm = rng.permutation(spec.n_obs)
        shuffled = MixedModelSpec(
            participant=tuple(spec.participant[i] for i in perm),
            item=tuple(spec.item[i] for i in perm),
            x_blue=spec.x_blue[perm],
            x_hidden=spec.x_hidden[perm],
            x_disc=spec.x_disc[perm],
            response=spec.response[perm],
        )
        a, b = fit_reml(spec), fit_reml(shuffled)
        assert a.effects == b.effects
        assert a.vc == b.vc
        assert a.reml_loglik == b.reml_loglik

    def test_relabeling_invariance(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 10, items, seed=7)
        relabeled = dataclasses.replace(
            spec,
            participant=tuple(f"zz-{v}" for v in spec.participant),
            item=tuple(f"link-{v}" for v in spec.item),
        )
        a, b = fit_reml(spec), fit_reml(relabeled)
        for ea, eb in zip(a.effects, b.effects):
            assert ea.estimate == pytest.approx(eb.estimate, abs=1e-9)
        assert a.vc.sigma_resid == pytest.approx(b.vc.sigma_resid, abs=1e-9)

    def test_optimum_is_local_maximum(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 25, items, seed=8)
        fit = fit_reml(spec)
        base = reml_loglik(fit.vc, spec)
        assert base == pytest.approx(fit.reml_loglik, abs=1e-7)
        for factor in (1.01, 0.99):
            for field in ("sigma_participant", "sigma_item", "sigma_resid"):
                value = getattr(fit.vc, field)
                if value == 0.0:
                    continue
                perturbed = dataclasses.replace(fit.vc, **{field: value * factor})
                assert reml_loglik(perturbed, spec) <= base + 1e-9

    def test_nonconvergence_carries_best_state(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 10, items, seed=9)
        with pytest.raises(ConvergenceError) as err:
            fit_reml(spec, max_iter=2)
        assert err.value.best is not None
        assert err.value.best.n_obs == spec.n_obs


class TestInformationCriteria:
    def test_loglik_shift_moves_aic_by_minus_two(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 10, items, seed=10)
        fit = fit_reml(spec)
        bumped = dataclasses.replace(fit, reml_loglik=fit.reml_loglik + 1.0)
        aic0, _ = information_criteria(fit)
        aic1, _ = information_criteria(bumped)
        assert aic1 - aic0 == pytest.approx(-2.0, abs=1e-10)

    def test_bic_aic_identity(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 10, items, seed=11)
        fit = fit_reml(spec)
        k = len(fit.effects) + 3
        assert fit.bic - fit.aic == pytest.approx(
            k * (math.log(fit.n_obs) - 2.0), abs=1e-9
        )


class TestSimulate:
    def test_zero_variance_gives_deterministic_rows(self):
        items = grid_items()
        b = PUBLISHED_MIDPOINT_B
        spec = simulate_responses(b, VarianceComponents(0, 0, 1e-300), 5, items, seed=12)
        assert np.allclose(spec.response, spec.design_matrix() @ b, atol=1e-12)

    def test_fixed_seed_bit_identical(self):
        items = grid_items()
        a = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 7, items, seed=13)
        b = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 7, items, seed=13)
        assert np.array_equal(a.response, b.response)
        c = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 7, items, seed=14)
        assert not np.array_equal(a.response, c.response)

    def test_participant_variance_law_of_large_numbers(self):
        items = [(0.5, 0.0, 0.0)]
        vc = VarianceComponents(2.0, 0.0, 1e-12)
        spec = simulate_responses(np.zeros(7), vc, 10_000, items, seed=15)
        per_participant = spec.response  # one observation per participant
        assert np.var(per_participant, ddof=1) == pytest.approx(4.0, rel=0.1)

    def test_clamped_copy_flagged_and_bounded(self):
        items = grid_items()
        vc = VarianceComponents(0.3, 0.3, 0.5)
        clamped = simulate_responses(PUBLISHED_MIDPOINT_B, vc, 20, items, seed=16, clamp=True)
        assert clamped.clamped
        assert clamped.response.min() >= 0.0 and clamped.response.max() <= 1.0
        raw = simulate_responses(PUBLISHED_MIDPOINT_B, vc, 20, items, seed=16, clamp=False)
        assert not raw.clamped
        assert raw.response.min() < 0.0 or raw.response.max() > 1.0

    def test_table_round_trip(self, tmp_path):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 4, items, seed=17)
        path = tmp_path / "sim.csv"
        path.write_text(spec.to_table())
        loaded = MixedModelSpec.from_table(path)
        assert loaded.participant == spec.participant
        assert loaded.item == spec.item
        assert np.array_equal(loaded.response, spec.response)
        assert np.array_equal(loaded.x_blue, spec.x_blue)

    def test_simulated_table_through_file_recovers_truth_in_typical_replicate(
        self, tmp_path
    ):
        # simulate at the published midpoint parameters, round-trip through the
        # long-format file, refit: all true coefficients inside the 95% CIs
        items = [stim.covariates() for stim in fixtures.MARBLE_STIMULI.values()]
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 40, items, seed=21)
        path = tmp_path / "sim.csv"
        path.write_text(spec.to_table())
        fit = fit_reml(MixedModelSpec.from_table(path))
        for effect, truth in zip(fit.effects, PUBLISHED_MIDPOINT_B):
            assert effect.ci_lo <= truth <= effect.ci_hi, effect.name

    def test_vc_confints_bracket_fitted_values(self):
        items = grid_items()
        spec = simulate_responses(PUBLISHED_MIDPOINT_B, PUBLISHED_MIDPOINT_VC, 30, items, seed=18)
        fit = fit_reml(spec)
        cis = vc_confints(spec, fit, refits=8, seed=19)
        assert set(cis) == {"sigma_participant", "sigma_item", "sigma_resid"}
        lo, hi = cis["sigma_resid"]
        assert 0.0 <= lo <= hi
        assert lo <= fit.vc.sigma_resid * 1.5  # loose: approximate parametric bootstrap

    def test_covariates_outside_unit_interval_rejected(self):
        with pytest.raises(ValueError):
            MixedModelSpec(
                participant=("p1", "p2"),
                item=("i1", "i2"),
                x_blue=np.array([0.5, 1.5]),
                x_hidden=np.array([0.1, 0.2]),
                x_disc=np.array([0.0, 0.0]),
                response=np.array([0.1, 0.2]),
            )
