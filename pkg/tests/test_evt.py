import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import genextreme

from exco.errors import DegenerateDataError, InputError, ParameterError
from exco.evt import (
    ChiMatrix,
    GevParams,
    ParetoMatrix,
    SignalMatrix,
    absolute_amplitude,
    chi_matrix,
    empirical_chi,
    empirical_pareto_transform,
    gev_cdf,
    gev_pdf,
)
from exco.simulate import make_fig3_triplet


def signal(columns, rate=100.0):
    arr = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    labels = [f"c{i}" for i in range(arr.shape[1])]
    return SignalMatrix(arr, labels, rate)


class TestAbsoluteAmplitude:
    def test_constant_column_is_zero(self):
        out = absolute_amplitude(signal([[5.0, 5.0, 5.0]]))
        assert np.array_equal(out.samples[:, 0], [0.0, 0.0, 0.0])

    def test_symmetric_column(self):
        out = absolute_amplitude(signal([[-1.0, 0.0, 1.0]]))
        assert np.array_equal(out.samples[:, 0], [1.0, 0.0, 1.0])

    def test_hand_computed_deviations(self):
        # mean of (2,4,6,8) is 5, absolute deviations (3,1,1,3)
        out = absolute_amplitude(signal([[2.0, 4.0, 6.0, 8.0]]))
        assert np.array_equal(out.samples[:, 0], [3.0, 1.0, 1.0, 3.0])

    def test_empty_matrix_rejected(self):
        with pytest.raises(InputError):
            SignalMatrix(np.empty((0, 2)), ["a", "b"], 100.0)

    def test_preserves_labels_and_rate(self):
        x = signal([[1.0, 2.0], [3.0, 4.0]], rate=250.0)
        out = absolute_amplitude(x)
        assert out.channels == x.channels
        assert out.sample_rate_hz == 250.0

    def test_nonfinite_rejected(self):
        with pytest.raises(InputError):
            signal([[1.0, np.nan, 2.0]])


class TestParetoTransform:
    def test_rank_formula_by_hand(self):
        # ranks of (3,1,4,2) are (3,1,4,2); F = rank/5; Y = 1/(1-F)
        y = empirical_pareto_transform(signal([[3.0, 1.0, 4.0, 2.0]]))
        expected = [2.5, 1.25, 5.0, 5.0 / 3.0]
        assert np.allclose(y.values[:, 0], expected, rtol=0, atol=1e-12)

    def test_single_observation(self):
        y = empirical_pareto_transform(signal([[7.0]]))
        assert y.values[0, 0] == pytest.approx(2.0, abs=1e-15)

    def test_tie_mid_ranks(self):
        y = empirical_pareto_transform(signal([[7.0, 7.0]]))
        assert np.allclose(y.values[:, 0], [2.0, 2.0])

    def test_minimum_entry_and_reciprocal_mean(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            t = int(rng.integers(5, 400))
            d = int(rng.integers(1, 6))
            x = signal(rng.normal(size=(d, t)))
            y = empirical_pareto_transform(x)
            assert np.all(y.values >= (t + 1) / t - 1e-12)
            # 1 - F is uniform on the rank grid, so mean(1/Y) ~ 0.5
            means = (1.0 / y.values).mean(axis=0)
            assert np.all(np.abs(means - 0.5) <= 3.0 / np.sqrt(t))

    def test_order_statistics_match_rank_grid(self):
        rng = np.random.default_rng(1)
        t = 100
        y = empirical_pareto_transform(signal([rng.normal(size=t)]))
        grid = (t + 1) / (t + 1 - np.arange(1, t + 1))
        assert np.allclose(np.sort(y.values[:, 0]), grid)

    def test_monotone_and_transform_invariant(self):
        rng = np.random.default_rng(2)
        col = rng.normal(size=50)
        y1 = empirical_pareto_transform(signal([col])).values[:, 0]
        order = np.argsort(col)
        assert np.all(np.diff(y1[order]) > 0)
        # strictly increasing marginal transform leaves ranks, hence Y, unchanged
        y2 = empirical_pareto_transform(signal([np.exp(col)])).values[:, 0]
        assert np.array_equal(y1, y2)

    def test_pareto_matrix_validation(self):
        with pytest.raises(InputError):
            ParetoMatrix(np.array([[0.5, 2.0]]), ["a", "b"])


class TestGev:
    def test_gumbel_cdf_at_location(self):
        assert gev_cdf(0.0, GevParams(0.0, 1.0, 0.0)) == pytest.approx(
            np.exp(-1.0), abs=1e-14
        )

    def test_frechet_below_lower_bound(self):
        # support lower bound is mu - sigma/xi = -2 for xi = 0.5
        assert gev_cdf(-2.0, GevParams(0.0, 1.0, 0.5)) == 0.0
        assert gev_cdf(-5.0, GevParams(0.0, 1.0, 0.5)) == 0.0

    def test_weibull_above_upper_bound(self):
        assert gev_cdf(2.0, GevParams(0.0, 1.0, -0.5)) == 1.0

    def test_weibull_value_against_high_precision_oracle(self):
        # exp(-(1 - 0.5*1)^2) evaluated at 50-digit precision with mpmath
        assert gev_cdf(1.0, GevParams(0.0, 1.0, -0.5)) == pytest.approx(
            0.7788007830714048682451703, abs=1e-15
        )

    @pytest.mark.parametrize("shape", [-1.0, -0.5, 0.0, 0.5, 1.0])
    def test_cdf_nondecreasing(self, shape):
        p = GevParams(0.3, 2.0, shape)
        xs = np.linspace(-20, 20, 401)
        values = [gev_cdf(x, p) for x in xs]
        assert np.all(np.diff(values) >= 0)
        assert all(0.0 <= v <= 1.0 for v in values)

    def test_continuity_at_gumbel_limit(self):
        gumbel = GevParams(0.0, 1.0, 0.0)
        for shape in (1e-8, -1e-8):
            p = GevParams(0.0, 1.0, shape)
            for x in np.linspace(-5, 8, 53):
                assert gev_cdf(x, p) == pytest.approx(gev_cdf(x, gumbel), abs=1e-6)
                assert gev_pdf(x, p) == pytest.approx(gev_pdf(x, gumbel), abs=1e-6)

    @pytest.mark.parametrize("shape", [-0.5, 0.2, 0.5])
    def test_against_scipy(self, shape):
        # scipy's genextreme uses the opposite sign convention for the shape
        p = GevParams(0.5, 1.5, shape)
        dist = genextreme(-shape, loc=0.5, scale=1.5)
        for x in np.linspace(-4, 6, 31):
            assert gev_cdf(x, p) == pytest.approx(dist.cdf(x), abs=1e-12)
            assert gev_pdf(x, p) == pytest.approx(dist.pdf(x), abs=1e-12)

    def test_gumbel_pdf_at_location(self):
        assert gev_pdf(0.0, GevParams(0.0, 1.0, 0.0)) == pytest.approx(
            np.exp(-1.0), abs=1e-14
        )

    def test_pdf_zero_outside_frechet_support(self):
        assert gev_pdf(-2.5, GevParams(0.0, 1.0, 0.5)) == 0.0

    @pytest.mark.parametrize("shape", [-0.5, 0.0, 0.5])
    def test_pdf_integrates_to_one(self, shape):
        p = GevParams(0.0, 1.0, shape)
        if shape > 0:
            lo, hi = -1.0 / shape, np.inf
        elif shape < 0:
            lo, hi = -np.inf, -1.0 / shape
        else:
            lo, hi = -np.inf, np.inf
        total, _ = quad(lambda x: gev_pdf(x, p), lo, hi, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_invalid_scale(self):
        with pytest.raises(ParameterError):
            GevParams(0.0, 0.0, 0.0)
        with pytest.raises(ParameterError):
            GevParams(0.0, -1.0, 0.1)


def unit_pareto(rng, n):
    return 1.0 / (1.0 - rng.uniform(size=n))


class TestEmpiricalChi:
    def test_identical_columns(self):
        rng = np.random.default_rng(3)
        y = unit_pareto(rng, 5000)
        assert empirical_chi(y, y, 0.95) == 1.0

    def test_independent_columns_near_one_minus_q(self):
        rng = np.random.default_rng(4)
        y1 = unit_pareto(rng, 10**6)
        y2 = unit_pareto(rng, 10**6)
        assert empirical_chi(y1, y2, 0.99) == pytest.approx(0.01, abs=0.005)

    def test_exchangeable(self):
        rng = np.random.default_rng(5)
        y1 = unit_pareto(rng, 4000)
        y2 = y1 * rng.uniform(0.5, 2.0, size=4000)
        assert empirical_chi(y1, y2, 0.9) == empirical_chi(y2, y1, 0.9)

    def test_invariant_under_increasing_transforms(self):
        rng = np.random.default_rng(6)
        y1 = unit_pareto(rng, 4000)
        y2 = unit_pareto(rng, 4000) * y1
        base = empirical_chi(y1, y2, 0.95)
        assert empirical_chi(np.log(y1), y2, 0.95) == base
        assert empirical_chi(y1, y2**3, 0.95) == base

    def test_no_exceedances_degenerate(self):
        with pytest.raises(DegenerateDataError):
            empirical_chi(np.full(100, 2.0), np.full(100, 2.0), 0.5)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            empirical_chi(np.ones(5) * 2, np.ones(6) * 2, 0.5)

    def test_quantile_domain(self):
        with pytest.raises(ParameterError):
            empirical_chi(np.ones(5) * 2, np.ones(5) * 2, 1.0)


class TestChiMatrix:
    def test_single_channel(self):
        y = ParetoMatrix(np.linspace(1.1, 9.0, 50)[:, None], ["a"])
        m = chi_matrix(y, 0.9)
        assert m.values.shape == (1, 1)
        assert m.values[0, 0] == 1.0

    def test_duplicated_channel_pair(self):
        rng = np.random.default_rng(7)
        col = unit_pareto(rng, 2000)
        y = ParetoMatrix(np.column_stack([col, col]), ["a", "b"])
        m = chi_matrix(y, 0.9)
        assert m.values[0, 1] == 1.0

    def test_symmetric_unit_diagonal_in_range(self):
        rng = np.random.default_rng(8)
        y = ParetoMatrix(
            np.column_stack([unit_pareto(rng, 3000) for _ in range(4)]),
            ["a", "b", "c", "d"],
        )
        m = chi_matrix(y, 0.95)
        assert np.array_equal(m.values, m.values.T)
        assert np.array_equal(np.diag(m.values), np.ones(4))
        assert np.all((m.values >= 0) & (m.values <= 1))

    def test_triplet_dependence_ordering(self):
        # Monte Carlo: the lag-coupled pair dominates both independent pairs
        trip = make_fig3_triplet(200_000, seed=12)
        y = empirical_pareto_transform(absolute_amplitude(trip))
        m = chi_matrix(y, 0.998)
        idx = {name: i for i, name in enumerate(m.channels)}
        chi_p4_t6 = m.values[idx["P4"], idx["T6"]]
        chi_t3_p4 = m.values[idx["T3"], idx["P4"]]
        chi_t3_t6 = m.values[idx["T3"], idx["T6"]]
        assert chi_p4_t6 > 0.15
        assert chi_p4_t6 > 5 * chi_t3_p4
        assert chi_p4_t6 > 5 * chi_t3_t6

    def test_chi_matrix_type_validation(self):
        with pytest.raises(InputError):
            ChiMatrix(np.array([[1.0, 0.3], [0.4, 1.0]]), ["a", "b"], 0.9)
