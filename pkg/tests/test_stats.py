import math
import random

import pytest
import scipy.stats as scipy_stats
from hypothesis import given, settings, strategies as st

from evograph.stats import (
    AnovaResult,
    StatsError,
    anova_oneway,
    average_ranks,
    f_sf,
    normal_sf,
    regularized_incomplete_beta,
    wilcoxon_rank_sum,
)


class TestWilcoxon:
    def test_exact_fixture(self):
        res = wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
        assert res.method == "exact"
        assert res.p_value == pytest.approx(0.1, abs=1e-12)
        assert res.decision == "≈"  # p = 0.1 >= alpha

    def test_identical_samples(self):
        res = wilcoxon_rank_sum([2.0, 2.0, 2.0, 3.0], [2.0, 2.0, 2.0, 3.0])
        assert res.decision == "≈"

    def test_clear_separation_decides(self):
        x = list(range(20, 40))
        y = list(range(0, 20))
        res = wilcoxon_rank_sum(x, y)
        assert res.decision == "+"
        assert wilcoxon_rank_sum(y, x).decision == "-"

    def test_small_sample_errors(self):
        with pytest.raises(StatsError):
            wilcoxon_rank_sum([1, 2], [1, 2, 3])

    def test_swap_invariance_and_antisymmetry(self):
        rng = random.Random(3)
        for _ in range(20):
            x = [rng.uniform(0, 10) for _ in range(rng.randint(3, 15))]
            y = [rng.uniform(0, 10) for _ in range(rng.randint(3, 15))]
            a = wilcoxon_rank_sum(x, y)
            b = wilcoxon_rank_sum(y, x)
            assert a.p_value == pytest.approx(b.p_value, abs=1e-12)
            flip = {"+": "-", "-": "+", "≈": "≈"}
            assert flip[a.decision] == b.decision

    def test_matches_scipy_exact(self):
        rng = random.Random(4)
        for _ in range(20):
            x = [rng.uniform(0, 100) for _ in range(rng.randint(3, 10))]
            y = [rng.uniform(0, 100) for _ in range(rng.randint(3, 30))]
            mine = wilcoxon_rank_sum(x, y)
            ref = scipy_stats.mannwhitneyu(x, y, alternative="two-sided", method="exact")
            assert mine.p_value == pytest.approx(float(ref.pvalue), abs=1e-6)

    def test_matches_scipy_asymptotic(self):
        rng = random.Random(5)
        for _ in range(20):
            x = [rng.randint(0, 15) for _ in range(rng.randint(12, 40))]
            y = [rng.randint(0, 15) for _ in range(rng.randint(12, 40))]
            if len(set(x + y)) == 1:
                continue
            mine = wilcoxon_rank_sum(x, y)
            ref = scipy_stats.mannwhitneyu(
                x, y, alternative="two-sided", method="asymptotic", use_continuity=True
            )
            assert mine.p_value == pytest.approx(float(ref.pvalue), abs=1e-6)

    def test_20v20_matches_reference(self):
        rng = random.Random(6)
        x = [round(rng.gauss(10, 2), 4) for _ in range(20)]
        y = [round(rng.gauss(11, 2), 4) for _ in range(20)]
        mine = wilcoxon_rank_sum(x, y)
        ref = scipy_stats.mannwhitneyu(
            x, y, alternative="two-sided", method="asymptotic", use_continuity=True
        )
        assert mine.p_value == pytest.approx(float(ref.pvalue), abs=1e-6)


class TestAnova:
    def test_constant_groups_degenerate(self):
        res = anova_oneway([[5.0, 5.0], [5.0, 5.0], [5.0, 5.0]])
        assert res == AnovaResult(f_stat=0.0, p_value=1.0, different=False)

    def test_zero_within_variance(self):
        res = anova_oneway([[1.0, 1.0], [2.0, 2.0]])
        assert math.isinf(res.f_stat) and res.different

    def test_hand_fixture_f3(self):
        res = anova_oneway([[1, 2, 3], [2, 3, 4], [3, 4, 5]])
        assert res.f_stat == pytest.approx(3.0, abs=1e-12)
        assert res.p_value == pytest.approx(0.125, abs=1e-9)
        assert not res.different

    def test_matches_scipy(self):
        rng = random.Random(7)
        for _ in range(20):
            groups = [
                [rng.gauss(g * rng.uniform(0, 1.5), 1.0) for _ in range(rng.randint(3, 25))]
                for g in range(rng.randint(2, 6))
            ]
            mine = anova_oneway(groups)
            ref = scipy_stats.f_oneway(*groups)
            assert mine.f_stat == pytest.approx(float(ref.statistic), abs=1e-6)
            assert mine.p_value == pytest.approx(float(ref.pvalue), abs=1e-6)

    @given(st.floats(-50, 50), st.floats(0.1, 20), st.integers(0, 1000))
    @settings(max_examples=40, deadline=None)
    def test_shift_and_scale_invariance(self, shift, scale, seed):
        rng = random.Random(seed)
        groups = [
            [rng.gauss(g, 1.0) for _ in range(rng.randint(3, 10))] for g in range(3)
        ]
        base = anova_oneway(groups)
        moved = anova_oneway([[v * scale + shift for v in grp] for grp in groups])
        assert moved.f_stat == pytest.approx(base.f_stat, rel=1e-9, abs=1e-9)

    def test_too_few_groups(self):
        with pytest.raises(StatsError):
            anova_oneway([[1, 2, 3]])
        with pytest.raises(StatsError):
            anova_oneway([[1], [2, 3]])


class TestSpecialFunctions:
    def test_incomplete_beta_against_scipy(self):
        import scipy.special as sp

        rng = random.Random(8)
        for _ in range(50):
            a, b = rng.uniform(0.5, 30), rng.uniform(0.5, 30)
            x = rng.random()
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                float(sp.betainc(a, b, x)), abs=1e-10
            )

    def test_f_sf_against_scipy(self):
        rng = random.Random(9)
        for _ in range(50):
            f = rng.uniform(0, 20)
            d1, d2 = rng.randint(1, 10), rng.randint(2, 60)
            assert f_sf(f, d1, d2) == pytest.approx(
                float(scipy_stats.f.sf(f, d1, d2)), abs=1e-10
            )

    def test_normal_sf(self):
        assert normal_sf(0.0) == pytest.approx(0.5)
        assert normal_sf(1.959963984540054) == pytest.approx(0.025, abs=1e-9)


class TestAverageRanks:
    def test_single_case(self):
        ranks = average_ranks([{"a": 3.0, "b": 1.0, "c": 2.0}])
        assert ranks == {"a": 1.0, "b": 3.0, "c": 2.0}

    def test_ties_share_average(self):
        ranks = average_ranks([{"a": 2.0, "b": 2.0, "c": 1.0}])
        assert ranks["a"] == ranks["b"] == 1.5
        assert ranks["c"] == 3.0

    def test_multi_case_mean(self):
        cases = [{"a": 2.0, "b": 1.0}, {"a": 1.0, "b": 2.0}, {"a": 5.0, "b": 0.0}]
        ranks = average_ranks(cases)
        assert ranks["a"] == pytest.approx((1 + 2 + 1) / 3)
