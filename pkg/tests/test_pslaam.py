import numpy as np
import pytest
from scipy.linalg import block_diag

from slpca.models.data_matrix import CenteringInfo, DataMatrix
from slpca.models.projection import AxesSource, CompletedBasis, ProjectionBasis
from slpca.models.regression import LinearRegression, RegressionSpec
from slpca.models.slpca_model import SlpcaModel
from slpca.services import pslaam_service
from slpca.services.axes_service import complete_basis, estimate_axes
from slpca.services.data_core import center_standardize
from slpca.utils.errors import DegenerateModelError, DimensionMismatchError, ParameterRangeError
from slpca.utils.regression_routing import RegressionKind

LINEAR = RegressionSpec(kind=RegressionKind.LINEAR)


def _pca_axes(data: DataMatrix, d_max: int, standardize: bool = False) -> ProjectionBasis:
    centered, _ = center_standardize(data, standardize)
    return estimate_axes(centered, AxesSource.PCA, d_max)


def _plane_model(mu_x=0.0, sigma_x=1.0, sigma2=1.0) -> SlpcaModel:
    """d = 1, p = 2 with identity axes and a zero restoration map"""
    return SlpcaModel(
        basis=CompletedBasis(P=[[1.0, 0.0]], Pbar=[[0.0, 1.0]]),
        regression=LinearRegression(intercept=[0.0], coefficients=[[0.0]]),
        mu_x=[mu_x],
        sigma_x=[[sigma_x]],
        sigma2=sigma2,
        centering=CenteringInfo.identity(2),
        n_train=1,
        column_names=["a", "b"],
    )


class TestGaussianEstimates:
    def test_two_points(self):
        mu, sigma = pslaam_service.mle_gaussian(np.array([[0.0], [2.0]]))
        np.testing.assert_allclose(mu, [1.0])
        np.testing.assert_allclose(sigma, [[1.0]])

    def test_repeated_point(self):
        mu, sigma = pslaam_service.mle_gaussian(np.tile([1.5, -2.0], (7, 1)))
        np.testing.assert_allclose(mu, [1.5, -2.0])
        np.testing.assert_allclose(sigma, np.zeros((2, 2)), atol=1e-15)

    def test_matches_double_loop(self, rng):
        X = rng.standard_normal((10, 2))
        mean = X.mean(axis=0)
        expected = sum(np.outer(x - mean, x - mean) for x in X) / 10
        _, sigma = pslaam_service.mle_gaussian(X)
        np.testing.assert_allclose(sigma, expected, atol=1e-12)

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_loops_on_small_instances(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(2, 51)), int(rng.integers(1, 7))
        X = rng.standard_normal((n, d)) * rng.uniform(0.5, 3.0, d) + rng.uniform(-2.0, 2.0, d)
        mean = np.array([sum(X[i, a] for i in range(n)) / n for a in range(d)])
        expected = np.zeros((d, d))
        for i in range(n):
            for a in range(d):
                for b in range(d):
                    expected[a, b] += (X[i, a] - mean[a]) * (X[i, b] - mean[b]) / n
        mu, sigma = pslaam_service.mle_gaussian(X)
        np.testing.assert_allclose(mu, mean, atol=1e-7)
        np.testing.assert_allclose(sigma, expected, atol=1e-7)

    def test_residual_variance(self):
        Z = np.array([[3.0, 4.0]])
        assert pslaam_service.residual_variance(Z, Z) == 0.0
        assert pslaam_service.residual_variance(Z, np.zeros((1, 2))) == pytest.approx(12.5)

    def test_no_complement(self):
        with pytest.raises(DegenerateModelError):
            pslaam_service.residual_variance(np.zeros((3, 0)), np.zeros((3, 0)))


class TestParameterCount:
    def test_linear(self):
        assert pslaam_service.parameter_count(1, 3, RegressionKind.LINEAR) == 7

    def test_spline(self):
        assert pslaam_service.parameter_count(1, 3, RegressionKind.SPLINE, m=4) == 11

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_pure_gaussian(self, d):
        assert pslaam_service.parameter_count(d, d, RegressionKind.LINEAR) == d + d * (d + 1) // 2

    def test_d_out_of_range(self):
        with pytest.raises(ParameterRangeError):
            pslaam_service.parameter_count(4, 3, RegressionKind.LINEAR)


class TestBic:
    def test_zero(self):
        assert pslaam_service.bic(0.0, 0, 5) == 0.0

    def test_unit_log_n(self):
        assert pslaam_service.bic(-100.0, 10, np.e) == pytest.approx(210.0)


class TestLogLikelihood:
    def test_standard_normal_point(self):
        model = _plane_model()
        value = pslaam_service.log_likelihood(model, DataMatrix.from_array([[0.0, 0.0]]))
        assert value == pytest.approx(-np.log(2 * np.pi), abs=1e-12)

    def test_doubling_the_data_doubles_it(self, rng):
        model = _plane_model(sigma_x=2.0, sigma2=0.5)
        values = rng.standard_normal((9, 2))
        once = pslaam_service.log_likelihood(model, DataMatrix.from_array(values))
        twice = pslaam_service.log_likelihood(model, DataMatrix.from_array(np.vstack([values, values])))
        assert twice == pytest.approx(2 * once, rel=1e-12)

    def test_fitted_noise_variance_is_optimal(self, random_data):
        model = pslaam_service.fit(random_data, _pca_axes(random_data, 2), 2, LINEAR)
        inflated = model.model_copy(update={"sigma2": 2 * model.sigma2})
        assert pslaam_service.log_likelihood(inflated, random_data) < pslaam_service.log_likelihood(
            model, random_data
        )

    def test_degenerate_noise(self):
        with pytest.raises(DegenerateModelError):
            pslaam_service.log_likelihood(_plane_model(sigma2=0.0), DataMatrix.from_array([[0.0, 0.0]]))


class TestFit:
    def test_statistics(self, random_data, projection_preserved):
        model = pslaam_service.fit(random_data, _pca_axes(random_data, 3), 2, LINEAR)
        projection_preserved(model)
        stats = model.statistics
        assert (model.d, model.p) == (2, 4)
        assert stats.gamma == pslaam_service.parameter_count(2, 4, RegressionKind.LINEAR)
        assert stats.log_likelihood == pytest.approx(pslaam_service.log_likelihood(model, random_data))
        assert stats.bic == pytest.approx(pslaam_service.bic(stats.log_likelihood, stats.gamma, 40))
        assert not stats.degenerate
        np.testing.assert_allclose(stats.projected_variances, np.diag(model.sigma_x))

    def test_exact_hyperplane_is_degenerate(self, rng):
        latent = rng.standard_normal((50, 2))
        values = latent @ np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0]]) + [1.0, 2.0, 3.0]
        data = DataMatrix.from_array(values)
        model = pslaam_service.fit(data, _pca_axes(data, 2), 2, LINEAR)
        assert model.statistics.degenerate
        assert model.statistics.sigma2 < 1e-12
        assert model.statistics.log_likelihood is None
        assert model.statistics.bic is None

    def test_d_must_leave_a_complement(self, random_data):
        with pytest.raises(ParameterRangeError):
            pslaam_service.fit(random_data, _pca_axes(random_data, 4), 4, LINEAR)

    def test_d_beyond_the_axes(self, random_data):
        with pytest.raises(ParameterRangeError):
            pslaam_service.fit(random_data, _pca_axes(random_data, 1), 2, LINEAR)

    def test_standardized_fit_reports_likelihood_in_data_units(self, random_data, projection_preserved):
        scaled = DataMatrix.from_array(random_data.values * [1.0, 10.0, 100.0, 0.1])
        model = pslaam_service.fit(scaled, _pca_axes(scaled, 1, standardize=True), 1, LINEAR, standardize=True)
        assert model.centering.standardized
        assert model.statistics.log_likelihood == pytest.approx(
            pslaam_service.log_likelihood(model, scaled)
        )
        projection_preserved(model)

    def test_spline_fit_improves_on_linear_for_curved_data(self, rng, projection_preserved):
        x = rng.uniform(-2.0, 2.0, 200)
        values = np.column_stack([x, x**2 + 0.05 * rng.standard_normal(200)])
        data = DataMatrix.from_array(values)
        axes = ProjectionBasis(axes=[[1.0, 0.0]], source=AxesSource.USER)
        linear = pslaam_service.fit(data, axes, 1, LINEAR)
        spline = pslaam_service.fit(data, axes, 1, RegressionSpec(m=6))
        assert spline.statistics.sigma2 < 0.01 < linear.statistics.sigma2
        assert spline.statistics.bic < linear.statistics.bic
        projection_preserved(linear)
        projection_preserved(spline)


class TestReconstruct:
    def test_reconstruction_is_idempotent(self, rng, projection_preserved):
        x = rng.uniform(-2.0, 2.0, 120)
        data = DataMatrix.from_array(np.column_stack([x, np.sin(x), np.cos(x)]) + 0.1 * rng.standard_normal((120, 3)))
        model = pslaam_service.fit(data, _pca_axes(data, 1), 1, RegressionSpec(m=5))
        once = pslaam_service.reconstruct(model, data)
        twice = pslaam_service.reconstruct(model, once)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-8)
        projection_preserved(model)

    @pytest.mark.parametrize("seed", range(20))
    def test_linear_pca_model_is_rank_d_truncation(self, seed, projection_preserved):
        rng = np.random.default_rng(100 + seed)
        p = 3 + seed % 6
        d = 1 + seed % (p - 1)
        values = rng.standard_normal((200, p)) @ rng.standard_normal((p, p)) + rng.uniform(-3.0, 3.0, p)
        data = DataMatrix.from_array(values)

        model = pslaam_service.fit(data, _pca_axes(data, d), d, LINEAR)

        mean = values.mean(axis=0)
        covariance = (values - mean).T @ (values - mean) / 200
        eigenvalues, vectors = np.linalg.eigh(covariance)
        U = vectors[:, np.argsort(eigenvalues)[::-1][:d]]
        expected = mean + (values - mean) @ U @ U.T
        np.testing.assert_allclose(pslaam_service.reconstruct(model, data).values, expected, atol=1e-8)
        projection_preserved(model)


class TestSample:
    def test_same_seed_same_draws(self, random_data):
        model = pslaam_service.fit(random_data, _pca_axes(random_data, 1), 1, LINEAR)
        first = pslaam_service.sample(model, 25, seed=3)
        second = pslaam_service.sample(model, 25, seed=3)
        np.testing.assert_array_equal(first.values, second.values)
        assert first.column_names == random_data.column_names

    def test_degenerate_model_repeats_one_point(self):
        model = _plane_model(mu_x=2.0, sigma_x=0.0, sigma2=0.0)
        drawn = pslaam_service.sample(model, 4, seed=0)
        np.testing.assert_allclose(drawn.values, np.tile([2.0, 0.0], (4, 1)))

    @pytest.mark.slow
    def test_refit_recovers_the_generating_parameters(self, random_data):
        model = pslaam_service.fit(random_data, _pca_axes(random_data, 2), 2, LINEAR)
        drawn = pslaam_service.sample(model, 50000, seed=11)
        axes = ProjectionBasis(axes=model.basis.P, source=AxesSource.USER)
        refit = pslaam_service.fit(drawn, axes, 2, LINEAR)
        assert refit.sigma2 == pytest.approx(model.sigma2, rel=0.03)
        standard_errors = np.sqrt(np.diag(model.sigma_x) / 50000)
        assert np.all(np.abs(refit.mu_x - model.mu_x) < 3 * standard_errors + 1e-12)


class TestImpliedGaussian:
    def test_matches_sample_moments(self, random_data):
        model = pslaam_service.fit(random_data, _pca_axes(random_data, 2), 2, LINEAR)
        mean, covariance = pslaam_service.implied_gaussian(model)
        np.testing.assert_allclose(mean, random_data.values.mean(axis=0), atol=1e-10)
        assert np.all(np.linalg.eigvalsh(covariance) > 0)

    def test_requires_linear_map(self, rng):
        x = rng.uniform(-2.0, 2.0, 60)
        data = DataMatrix.from_array(np.column_stack([x, x**2]))
        model = pslaam_service.fit(data, ProjectionBasis(axes=[[1.0, 0.0]]), 1, RegressionSpec(m=5))
        with pytest.raises(ParameterRangeError):
            pslaam_service.implied_gaussian(model)

    @pytest.mark.slow
    def test_matches_a_constant_map_sample(self, rng):
        P = np.linalg.qr(rng.standard_normal((4, 2)))[0].T
        basis = complete_basis(P, 4)
        sigma_x = np.array([[2.0, 0.5], [0.5, 1.0]])
        model = SlpcaModel(
            basis=basis,
            regression=LinearRegression(intercept=[0.0, 0.0], coefficients=np.zeros((2, 2))),
            mu_x=[0.0, 0.0],
            sigma_x=sigma_x,
            sigma2=0.3,
            centering=CenteringInfo.identity(4),
            n_train=1,
            column_names=["a", "b", "c", "d"],
        )
        expected = basis.Q.T @ block_diag(sigma_x, 0.3 * np.eye(2)) @ basis.Q

        _, implied = pslaam_service.implied_gaussian(model)
        np.testing.assert_allclose(implied, expected, atol=1e-12)

        drawn = pslaam_service.sample(model, 100000, seed=4).values
        empirical = np.cov(drawn, rowvar=False, bias=True)
        assert np.linalg.norm(empirical - expected) <= 0.05 * np.linalg.norm(expected)


class TestLikelihoodConsistency:
    @pytest.mark.parametrize("factor", [0.99, 1.01])
    def test_fitted_parameters_beat_perturbed_ones(self, rng, factor):
        x = rng.uniform(-2.0, 2.0, 150)
        values = np.column_stack([x, np.sin(x), 0.3 * x**2]) + 0.1 * rng.standard_normal((150, 3))
        data = DataMatrix.from_array(values)
        model = pslaam_service.fit(data, _pca_axes(data, 1), 1, RegressionSpec(m=5))
        best = pslaam_service.log_likelihood(model, data)
        for update in (
            {"sigma2": model.sigma2 * factor},
            {"sigma_x": model.sigma_x * factor},
            {"mu_x": model.mu_x + (factor - 1) * np.sqrt(np.diag(model.sigma_x))},
        ):
            assert pslaam_service.log_likelihood(model.model_copy(update=update), data) <= best


class TestRefit:
    @pytest.fixture
    def curve_model(self, rng):
        x = rng.uniform(-2.0, 2.0, 300)
        values = np.column_stack([x, np.sin(2 * x), 0.5 * x**2]) + 0.1 * rng.standard_normal((300, 3))
        data = DataMatrix.from_array(values)
        return pslaam_service.fit(data, _pca_axes(data, 1), 1, RegressionSpec(m=6))

    def test_keeps_axes_spec_and_bases(self, curve_model, projection_preserved):
        drawn = pslaam_service.sample(curve_model, 2000, seed=8)
        refitted = pslaam_service.refit(curve_model, drawn, seed=8)
        assert refitted.seed == 8
        assert refitted.m == curve_model.m
        np.testing.assert_array_equal(refitted.basis.P, curve_model.basis.P)
        np.testing.assert_array_equal(refitted.regression.bases[0].knots, curve_model.regression.bases[0].knots)
        assert refitted.sigma2 == pytest.approx(curve_model.sigma2, rel=0.15)
        projection_preserved(refitted)

    def test_fit_rejects_bases_of_another_size(self, curve_model, random_data):
        with pytest.raises(DimensionMismatchError):
            pslaam_service.fit(
                random_data, _pca_axes(random_data, 2), 2, RegressionSpec(m=6), bases=curve_model.regression.bases
            )

    def test_linear_model_refits_linearly(self, random_data):
        model = pslaam_service.fit(random_data, _pca_axes(random_data, 2), 2, LINEAR)
        refitted = pslaam_service.refit(model, random_data)
        assert refitted.kind == RegressionKind.LINEAR
        assert refitted.seed is None
        assert refitted.sigma2 == pytest.approx(model.sigma2, rel=1e-10)
