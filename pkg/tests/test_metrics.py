import math

import numpy as np
import pytest

from aafv.core.errors import ParameterError
from aafv.metrics.stats import summarize, t_two_sided_p, welch_t_test
from aafv.schemas.schemas import ModelKind, Scenario, SeedResult


def result(scenario, kind, accuracy, seed_index=0, client_index=0):
    return SeedResult(
        seed_index=seed_index,
        seed=seed_index,
        scenario=scenario,
        model_kind=kind,
        client_index=client_index,
        accuracy=accuracy,
    )


def closed_form_p(t, df):
    """Two-sided Student-t tail from the finite trigonometric series for integer df."""
    theta = math.atan(abs(t) / math.sqrt(df))
    s, c = math.sin(theta), math.cos(theta)
    if df % 2 == 1:
        series, term = 0.0, c
        for k in range(1, (df - 1) // 2 + 1):
            series += term
            term *= c * c * (2 * k) / (2 * k + 1)
        a = 2.0 / math.pi * (theta + s * series) if df > 1 else 2.0 * theta / math.pi
    else:
        series, term = 0.0, 1.0
        for k in range(1, df // 2 + 1):
            series += term
            term *= c * c * (2 * k - 1) / (2 * k)
        a = s * series
    return 1.0 - a


T_FIXTURES = [
    (0.5, 1),
    (2.0, 1),
    (1.0, 2),
    (3.0, 2),
    (1.5, 3),
    (0.2, 4),
    (2.5, 4),
    (1.0, 5),
    (4.0, 6),
    (2.2, 7),
]


class TestSummarize:
    def test_single_result(self):
        (summary,) = summarize([result(Scenario.AAFV, ModelKind.SVM, 0.7)])
        assert summary.mean == 0.7
        assert summary.stddev == 0.0
        assert summary.count == 1
        assert summary.ci95_half_width == 0.0

    def test_sample_standard_deviation(self):
        (summary,) = summarize(
            [result(Scenario.AAFV, ModelKind.SVM, 0.7), result(Scenario.AAFV, ModelKind.SVM, 0.8, 1)]
        )
        assert summary.mean == pytest.approx(0.75)
        assert summary.stddev == pytest.approx(math.sqrt(0.005))
        assert summary.ci95_half_width == pytest.approx(1.959963984540054 * math.sqrt(0.005) / math.sqrt(2))

    def test_constant_values(self):
        results = [result(Scenario.LOCAL, ModelKind.MLP, 0.6, i) for i in range(5)]
        (summary,) = summarize(results)
        assert summary.mean == 0.6
        assert summary.stddev == 0.0
        assert summary.ci95_half_width == 0.0

    def test_groups_are_separated_and_ordered(self):
        results = [
            result(Scenario.LOCAL, ModelKind.LOGISTIC, 0.6),
            result(Scenario.FEDAVG, ModelKind.LOGISTIC, 0.65),
            result(Scenario.AAFV, ModelKind.SVM, 0.7),
            result(Scenario.AAFV, ModelKind.LOGISTIC, 0.72),
        ]
        keys = [(s.scenario, s.model_kind) for s in summarize(results)]
        assert keys == [
            (Scenario.AAFV, ModelKind.LOGISTIC),
            (Scenario.AAFV, ModelKind.SVM),
            (Scenario.FEDAVG, ModelKind.LOGISTIC),
            (Scenario.LOCAL, ModelKind.LOGISTIC),
        ]

    def test_empty(self):
        with pytest.raises(ParameterError):
            summarize([])


class TestStudentT:
    @pytest.mark.parametrize("t, df", T_FIXTURES)
    def test_matches_closed_form(self, t, df):
        assert t_two_sided_p(t, df) == pytest.approx(closed_form_p(t, df), abs=1e-8)

    def test_known_values(self):
        assert t_two_sided_p(0.0, 3.0) == pytest.approx(1.0)
        assert t_two_sided_p(1.0, 1.0) == pytest.approx(0.5)
        assert t_two_sided_p(math.inf, 4.0) == 0.0

    def test_monotone_in_abs_t(self):
        values = [t_two_sided_p(t, 6.5) for t in np.linspace(0, 8, 50)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_symmetric_in_t(self):
        assert t_two_sided_p(-1.7, 9.3) == pytest.approx(t_two_sided_p(1.7, 9.3))

    def test_invalid_df(self):
        with pytest.raises(ParameterError):
            t_two_sided_p(1.0, 0.0)


class TestWelch:
    def test_identical_samples(self):
        res = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.t_statistic == 0.0
        assert res.p_value == pytest.approx(1.0)

    def test_shifted_samples(self):
        res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        assert res.t_statistic == pytest.approx(-1.0)
        assert res.df == pytest.approx(8.0)
        assert res.p_value == pytest.approx(0.3465935, abs=1e-6)

    def test_well_separated(self):
        rng = np.random.default_rng(0)
        a = rng.normal(0.0, 1.0, 10)
        b = rng.normal(10.0, 1.0, 10)
        assert welch_t_test(a, b).p_value < 1e-6

    def test_swapping_samples_negates_t(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(0, 1, 8), rng.normal(0.5, 2, 12)
        ab, ba = welch_t_test(a, b), welch_t_test(b, a)
        assert ab.t_statistic == pytest.approx(-ba.t_statistic)
        assert ab.p_value == pytest.approx(ba.p_value)
        assert ab.df == pytest.approx(ba.df)

    def test_welch_satterthwaite_df(self):
        a, b = [1.0, 2.0, 4.0], [3.0, 3.5, 9.0, 10.0]
        va, vb = np.var(a, ddof=1) / 3, np.var(b, ddof=1) / 4
        expected = (va + vb) ** 2 / (va**2 / 2 + vb**2 / 3)
        assert welch_t_test(a, b).df == pytest.approx(expected)

    def test_constant_equal_samples(self):
        res = welch_t_test([0.7, 0.7], [0.7, 0.7, 0.7])
        assert res.p_value == 1.0
        assert res.df is None

    def test_constant_samples_of_different_sizes(self):
        # 0.7 summed three times is not exactly 2.1, so the sample variance is not exactly zero
        res = welch_t_test([0.7] * 3, [0.7] * 2)
        assert res.p_value == 1.0
        assert res.t_statistic == 0.0
        assert welch_t_test([0.1] * 7, [0.1] * 4).p_value == 1.0

    def test_constant_unequal_samples(self):
        res = welch_t_test([0.7, 0.7], [0.8, 0.8])
        assert res.p_value == 0.0
        assert res.t_statistic is None

    def test_needs_two_values(self):
        with pytest.raises(ParameterError):
            welch_t_test([1.0], [1.0, 2.0])
