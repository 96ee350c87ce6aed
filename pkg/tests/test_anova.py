import numpy as np
import pytest
from scipy import stats

from ivsurvey.anova import (
    DesignError,
    RMDesign,
    UndefinedFError,
    _factorial_ss,
    gg_epsilon,
    mc_anova,
    one_sample_scale_midpoint_test,
    rm_anova_factorial,
    rm_anova_oneway,
)
from ivsurvey.bootstrap import DegenerateSampleError


def compound_symmetric(k, variance=2.0, rho=0.4):
    return variance * ((1 - rho) * np.eye(k) + rho * np.ones((k, k)))


class TestGGEpsilon:
    def test_compound_symmetry_gives_one(self):
        assert gg_epsilon(compound_symmetric(4)) == pytest.approx(1.0, abs=1e-10)

    def test_two_levels_always_one(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(2, 2))
        s = a @ a.T
        assert gg_epsilon(s) == 1.0

    def test_rank_one_centered_covariance_hits_lower_bound(self):
        k = 5
        v = np.arange(k, dtype=float)
        v -= v.mean()  # centered, so double-centering preserves rank one
        s = np.outer(v, v)
        assert gg_epsilon(s) == pytest.approx(1.0 / (k - 1), abs=1e-12)

    def test_asymmetric_input_rejected(self):
        s = np.array([[1.0, 0.5], [0.2, 1.0]])
        with pytest.raises(ValueError):
            gg_epsilon(s)

    def test_bounds_respected(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = rng.normal(size=(6, 6))
            eps = gg_epsilon(a @ a.T)
            assert 1.0 / 5.0 <= eps <= 1.0


class TestOneWay:
    def test_identical_conditions_per_subject_give_zero_f_unit_p(self):
        rng = np.random.default_rng(2)
        subject_values = rng.normal(size=12)
        data = np.tile(subject_values[:, None], (1, 4))
        row = rm_anova_oneway(data).rows[0]
        assert row.F == 0.0
        assert row.p == 1.0
        assert row.eta_p_sq == 0.0

    def test_constant_data_undefined(self):
        with pytest.raises(UndefinedFError):
            rm_anova_oneway(np.full((6, 3), 2.5))

    def test_zero_error_with_real_effect_undefined(self):
        data = np.tile(np.array([[1.0, 2.0, 4.0]]), (5, 1))  # identical subjects
        with pytest.raises(UndefinedFError):
            rm_anova_oneway(data)

    def test_zero_effect_with_error_variance(self):
        rng = np.random.default_rng(3)
        noise = rng.normal(size=(10, 4))
        data = noise - noise.mean(axis=1, keepdims=True)  # no condition effect on average
        table = rm_anova_oneway(data)
        row = table.rows[0]
        assert row.F >= 0.0
        assert 0.0 <= row.p <= 1.0

    def test_exactly_zero_effect(self):
        # per-subject values arranged so every condition mean is the grand mean
        data = np.array([[1.0, 2.0, 3.0], [2.0, 3.0, 1.0], [3.0, 1.0, 2.0]])
        table = rm_anova_oneway(data)
        assert table.rows[0].ss_effect == pytest.approx(0.0, abs=1e-12)
        assert table.rows[0].F == pytest.approx(0.0, abs=1e-12)
        assert table.rows[0].p == pytest.approx(1.0, abs=1e-12)

    def test_corrected_df_arithmetic_matches_reported_pair(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=(40, 4))
        table = rm_anova_oneway(data, epsilon=0.693)
        row = table.rows[0]
        assert row.df1_corrected == pytest.approx(2.079, abs=0.01)
        assert row.df2_corrected == pytest.approx(81.09, abs=0.01)

    def test_two_level_equals_squared_paired_t(self):
        rng = np.random.default_rng(5)
        a = rng.normal(0.3, 1.0, size=15)
        b = rng.normal(0.0, 1.0, size=15)
        table = rm_anova_oneway(np.column_stack([a, b]))
        row = table.rows[0]
        t_stat, t_p = stats.ttest_rel(a, b)
        assert row.epsilon == 1.0  # k=2
        assert row.F == pytest.approx(t_stat**2, rel=1e-10)
        assert row.p == pytest.approx(t_p, rel=1e-10)

    def test_ss_components_sum_to_total(self):
        rng = np.random.default_rng(6)
        data = rng.normal(size=(9, 5))
        table = rm_anova_oneway(data)
        n, k = data.shape
        grand = data.mean()
        ss_total = float(((data - grand) ** 2).sum())
        ss_subject = k * float(((data.mean(axis=1) - grand) ** 2).sum())
        row = table.rows[0]
        assert row.ss_effect + row.ss_error + ss_subject == pytest.approx(
            ss_total, rel=1e-12
        )

    def test_f_invariant_under_per_subject_shift(self):
        rng = np.random.default_rng(7)
        data = rng.normal(size=(8, 3)) + np.array([0.0, 0.5, 1.0])
        shifted = data + rng.normal(size=(8, 1)) * 13.0
        f0 = rm_anova_oneway(data).rows[0].F
        f1 = rm_anova_oneway(shifted).rows[0].F
        assert f1 == pytest.approx(f0, rel=1e-9)

    def test_eta_p_sq_in_unit_range(self):
        rng = np.random.default_rng(8)
        data = rng.normal(size=(10, 4)) + np.array([0, 1, 2, 3])
        row = rm_anova_oneway(data).rows[0]
        assert 0.0 < row.eta_p_sq < 1.0

    def test_too_few_levels_rejected(self):
        with pytest.raises(DesignError):
            rm_anova_oneway(np.zeros((5, 1)))

    def test_too_few_subjects_rejected(self):
        with pytest.raises(DesignError):
            rm_anova_oneway(np.zeros((1, 4)))

    def test_missing_cells_rejected(self):
        data = np.ones((4, 3))
        data[1, 2] = np.nan
        with pytest.raises(DesignError):
            rm_anova_oneway(data)


class TestFactorial:
    def test_constant_in_b_zeroes_b_and_interaction(self):
        rng = np.random.default_rng(9)
        base = rng.normal(size=(12, 4, 1))
        data = np.repeat(base, 3, axis=2)  # identical across B levels
        ss = _factorial_ss(data)
        assert ss["B"][0] == pytest.approx(0.0, abs=1e-18)
        assert ss["AxB"][0] == pytest.approx(0.0, abs=1e-18)

    def test_additive_noiseless_data_has_zero_interaction(self):
        alpha = np.array([0.0, 1.0, 2.0, 3.0])
        beta = np.array([0.0, -1.0, 1.0])
        data = np.zeros((6, 4, 3)) + alpha[None, :, None] + beta[None, None, :]
        ss = _factorial_ss(data)
        assert ss["AxB"][0] == pytest.approx(0.0, abs=1e-20)

    def test_word_frequency_df_arithmetic_anchor(self):
        # reported corrected pair (1.684, 65.686) implies eps ~= .842 at n=40
        rng = np.random.default_rng(10)
        data = rng.normal(size=(40, 4, 3))
        eps_b = 65.686 / 78.0
        table = rm_anova_factorial(data, epsilon={"B": eps_b})
        row = table.row("B")
        assert row.df1_corrected == pytest.approx(1.684, abs=0.01)
        assert row.df2_corrected == pytest.approx(65.686, abs=0.01)

    def test_effects_tested_against_own_error_terms(self):
        rng = np.random.default_rng(11)
        data = rng.normal(size=(20, 3, 4)) + np.arange(3)[None, :, None] * 0.8
        table = rm_anova_factorial(data)
        assert {r.effect for r in table.rows} == {"A", "B", "A:B"}
        assert table.row("A").p < 0.001  # strong injected main effect
        assert table.row("B").p > 0.001  # pure noise

    def test_main_effect_epsilon_matches_collapsed_oneway(self):
        rng = np.random.default_rng(12)
        data = rng.normal(size=(25, 4, 3))
        table = rm_anova_factorial(data)
        collapsed = data.mean(axis=2)
        expected = gg_epsilon(np.cov(collapsed, rowvar=False, ddof=1))
        assert table.row("A").epsilon == pytest.approx(expected, rel=1e-9)

    def test_ss_decomposition_complete(self):
        rng = np.random.default_rng(13)
        data = rng.normal(size=(10, 3, 4))
        ss = _factorial_ss(data)
        n = data.shape[0]
        grand = data.mean()
        ss_total = float(((data - grand) ** 2).sum())
        ss_subj = 12 * float(((data.mean(axis=(1, 2)) - grand) ** 2).sum())
        parts = sum(v for pair in ss.values() for v in pair) + ss_subj
        assert parts == pytest.approx(ss_total, rel=1e-11)


class TestMcAnova:
    def test_strong_effect_gives_minimal_p(self):
        rng = np.random.default_rng(14)
        data = rng.normal(size=(20, 4)) * 0.01 + np.array([0.0, 5.0, 10.0, 15.0])
        p = mc_anova(data, M=199, seed=21)["condition"]
        assert p == 1.0 / 200.0

    def test_determinism_and_floor(self):
        rng = np.random.default_rng(15)
        data = rng.normal(size=(10, 3))
        p1 = mc_anova(data, M=499, seed=5)
        p2 = mc_anova(data, M=499, seed=5)
        assert p1 == p2
        assert all(v >= 1.0 / 500.0 for v in p1.values())

    def test_factorial_returns_three_effects(self):
        rng = np.random.default_rng(16)
        data = rng.normal(size=(12, 3, 2))
        p = mc_anova(data, M=99, seed=2)
        assert set(p) == {"A", "B", "A:B"}

    def test_factorial_strong_effect_minimal_p(self):
        rng = np.random.default_rng(17)
        data = rng.normal(size=(15, 3, 2)) * 0.01
        data += np.array([0.0, 4.0, 8.0])[None, :, None]
        p = mc_anova(data, M=199, seed=3)
        assert p["A"] == 1.0 / 200.0
        assert p["B"] > 0.05

    def test_direction_parity_with_parametric_factorial(self):
        # one real main effect (B), nothing else: the permutation check must
        # agree with the parametric conclusion for every effect
        rng = np.random.default_rng(18)
        data = rng.normal(size=(24, 4, 3)) + np.array([0.0, 1.5, 3.0])[None, None, :]
        table = rm_anova_factorial(data)
        perm = mc_anova(data, M=999, seed=4)
        for key in ("A", "B", "A:B"):
            parametric_significant = table.row(key).p < 0.05
            permutation_significant = perm[key] < 0.05
            assert parametric_significant == permutation_significant, key
        assert table.row("B").p < 0.05  # the injected effect is detected

    def test_quick_null_calibration(self):
        # 120-simulation smoke check; the 500-run gate lives in acceptance
        sims = 120
        rejections = 0
        seeds = np.random.SeedSequence(2718).spawn(sims)
        rng = np.random.default_rng(2718)
        for ss in seeds:
            data = rng.standard_normal((12, 3))
            p = mc_anova(data, M=199, seed=int(ss.generate_state(1)[0]))["condition"]
            rejections += p <= 0.05
        assert 0.005 <= rejections / sims <= 0.12


class TestScaleMidpointTest:
    def test_constant_threes_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            one_sample_scale_midpoint_test([3.0] * 10, B=99, seed=0)

    def test_symmetric_around_midpoint_large_p(self):
        values = [2.0, 4.0, 2.5, 3.5, 1.0, 5.0]
        r = one_sample_scale_midpoint_test(values, B=1999, seed=1)
        assert r.p_value > 0.5

    def test_shifted_feedback_rejects(self):
        values = [4.0, 4.5, 4.0, 5.0, 4.5, 4.0, 3.5, 4.5]
        r = one_sample_scale_midpoint_test(values, B=1999, seed=2)
        assert r.p_value < 0.01
        assert r.mean == pytest.approx(np.mean(values))
