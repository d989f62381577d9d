import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg, stats

from slpca.models.data_matrix import DataMatrix
from slpca.models.projection import ProjectionBasis
from slpca.models.regression import AdditiveRegression, RegressionSpec
from slpca.models.slpca_model import FitStatistics, SlpcaModel
from slpca.models.spline_basis import BSplineBasis
from slpca.services import regression_service
from slpca.services.axes_service import complete_basis, project
from slpca.services.data_core import center_standardize
from slpca.services.regression_manager import RegressionManager, default_regression_manager
from slpca.utils.errors import (
    DegenerateModelError,
    DimensionMismatchError,
    ParameterRangeError,
)
from slpca.utils.regression_routing import RegressionKind

logger = logging.getLogger(__name__)

SIGMA2_FLOOR = 1e-12


def mle_gaussian(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and covariance (denominator n) of the projected points"""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        raise ParameterRangeError("Gaussian MLE needs at least 2 points")
    mu = X.mean(axis=0)
    centered = X - mu
    sigma = centered.T @ centered / X.shape[0]
    return mu, (sigma + sigma.T) / 2


def residual_variance(Z: np.ndarray, Zhat: np.ndarray) -> float:
    """sigma^2 = 1/(n (p - d)) sum ||z_i - zhat_i||^2"""
    Z = np.asarray(Z, dtype=float)
    Zhat = np.asarray(Zhat, dtype=float)
    if Z.shape != Zhat.shape:
        raise DimensionMismatchError(f"Z {Z.shape} and Zhat {Zhat.shape} differ in shape")
    if Z.ndim != 2 or Z.shape[1] == 0:
        raise DegenerateModelError("No orthogonal block (p = d); the model is a pure Gaussian on X")
    n, width = Z.shape
    return float(np.sum((Z - Zhat) ** 2) / (n * width))


def parameter_count(
    d: int,
    p: int,
    kind: RegressionKind,
    m: Optional[int] = None,
    manager: RegressionManager = default_regression_manager,
) -> int:
    """Free parameters gamma of a model: d + d(d+1)/2 + 1 + (p - d) + coefficients"""
    if not 1 <= d <= p:
        raise ParameterRangeError(f"Need 1 <= d <= p, got d = {d}, p = {p}")
    kind = RegressionKind(kind)
    if kind == RegressionKind.SPLINE:
        # the count does not depend on the degree
        spec = RegressionSpec(kind=kind, m=m, degree=0)
    else:
        spec = RegressionSpec(kind=kind)
    return manager.parameter_count(d, p, spec)


def bic(log_likelihood: float, gamma: int, n: int) -> float:
    """Bayesian information criterion, smaller is better"""
    if n < 1:
        raise ParameterRangeError(f"BIC needs n >= 1, got {n}")
    return -2.0 * log_likelihood + gamma * np.log(n)


def _latent_and_complement(model: SlpcaModel, Y: DataMatrix) -> Tuple[np.ndarray, np.ndarray]:
    if Y.p != model.p:
        raise DimensionMismatchError(f"Data have {Y.p} columns, model expects {model.p}")
    centered = model.centering.apply(Y.values)
    return centered @ model.basis.P.T, centered @ model.basis.Pbar.T


def log_likelihood(model: SlpcaModel, Y: DataMatrix) -> float:
    """Sum of the latent Gaussian and complement Gaussian log-densities, in data units"""
    if model.sigma2 < SIGMA2_FLOOR:
        raise DegenerateModelError(f"Noise variance {model.sigma2:.3g} is below {SIGMA2_FLOOR}")
    sigma_x = np.atleast_2d(model.sigma_x)
    try:
        linalg.cholesky(sigma_x, lower=True)
    except linalg.LinAlgError:
        raise DegenerateModelError("Latent covariance sigma_x is singular")

    X, Z = _latent_and_complement(model, Y)
    latent = stats.multivariate_normal(mean=model.mu_x, cov=sigma_x).logpdf(X)
    residuals = Z - regression_service.predict(model.regression, X)
    noise = stats.norm(loc=0.0, scale=np.sqrt(model.sigma2)).logpdf(residuals)
    # Q is unitary; only the standardization scales contribute a Jacobian
    jacobian = -Y.n * np.sum(np.log(model.centering.scales))
    return float(np.sum(latent) + np.sum(noise) + jacobian)


def fit(
    Y: DataMatrix,
    axes: ProjectionBasis,
    d: int,
    spec: RegressionSpec,
    standardize: bool = False,
    manager: RegressionManager = default_regression_manager,
    bases: Optional[List[BSplineBasis]] = None,
) -> SlpcaModel:
    """Fit the model in four steps: center, project, regress, score"""
    if not 1 <= d <= axes.d_max:
        raise ParameterRangeError(f"d must be in [1, {axes.d_max}], got {d}")
    if axes.p != Y.p:
        raise DimensionMismatchError(f"Axes live in dimension {axes.p}, data have {Y.p} columns")
    if d >= Y.p:
        raise ParameterRangeError(f"d = {d} leaves no orthogonal complement in dimension {Y.p}")

    # (C) center
    centered, centering = center_standardize(Y, standardize)

    # (P) project
    basis = complete_basis(axes.axes[:d], Y.p)
    X, Z = project(centered, basis)
    mu_x, sigma_x = mle_gaussian(X)

    # (R) regress the complement on the projection
    adapter = manager.get_adapter(spec.kind)
    regression = adapter.fit(X, Z, spec, bases=bases)
    sigma2 = residual_variance(Z, adapter.predict(regression, X))

    model = SlpcaModel(
        basis=basis,
        regression=regression,
        mu_x=mu_x,
        sigma_x=sigma_x,
        sigma2=sigma2,
        centering=centering,
        n_train=Y.n,
        column_names=Y.column_names,
        axes_source=axes.source,
    )

    # (S) score
    gamma = manager.parameter_count(d, Y.p, spec)
    degenerate = sigma2 < SIGMA2_FLOOR
    log_l = bic_value = None
    if degenerate:
        logger.warning(f"Degenerate fit: sigma^2 = {sigma2:.3g} for d = {d}, {spec.label}")
    else:
        try:
            log_l = log_likelihood(model, Y)
            bic_value = bic(log_l, gamma, Y.n)
        except DegenerateModelError as e:
            logger.warning(f"Degenerate fit for d = {d}, {spec.label}: {e}")
            degenerate = True

    statistics = FitStatistics(
        gamma=gamma,
        log_likelihood=log_l,
        bic=bic_value,
        sigma2=sigma2,
        projected_variances=np.diag(sigma_x).tolist(),
        total_inertia=float(np.sum(centered.values**2) / Y.n),
        degenerate=degenerate,
    )
    logger.info(
        f"Fitted d = {d}, {spec.label}: sigma^2 = {sigma2:.6g}, gamma = {gamma}, BIC = {bic_value}"
    )
    return model.model_copy(update={"statistics": statistics})


def reconstruct(model: SlpcaModel, Y: DataMatrix) -> DataMatrix:
    """Apply g = R o P: project, restore the complement, rotate back and un-center"""
    X, _ = _latent_and_complement(model, Y)
    Zhat = regression_service.predict(model.regression, X)
    restored = X @ model.basis.P + Zhat @ model.basis.Pbar
    return DataMatrix(values=model.centering.invert(restored), column_names=Y.column_names)


def _covariance_factor(sigma: np.ndarray) -> np.ndarray:
    """A factor F with F F' = sigma, valid for semi-definite sigma"""
    eigenvalues, vectors = linalg.eigh(np.atleast_2d(sigma))
    return vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def sample(model: SlpcaModel, n: int, seed: int) -> DataMatrix:
    """Draw n points from the model; all latent draws first, then the noise, row-major"""
    if n < 1:
        raise ParameterRangeError(f"Sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    d, width = model.d, model.p - model.d

    X = model.mu_x + rng.standard_normal((n, d)) @ _covariance_factor(model.sigma_x).T
    noise = rng.standard_normal((n, width))
    Z = regression_service.predict(model.regression, X) + np.sqrt(model.sigma2) * noise

    centered = X @ model.basis.P + Z @ model.basis.Pbar
    logger.info(f"Sampled {n} points from model (d = {d}, p = {model.p}, seed = {seed})")
    return DataMatrix(values=model.centering.invert(centered), column_names=model.column_names)


def refit(
    model: SlpcaModel,
    Y: DataMatrix,
    seed: Optional[int] = None,
    manager: RegressionManager = default_regression_manager,
) -> SlpcaModel:
    """Fit Y with the axes, restoration spec and spline bases of an existing model.

    seed records the generator seed when Y was drawn from a model.
    """
    axes = ProjectionBasis(axes=model.basis.P, source=model.axes_source)
    spec = manager.get_adapter(model.kind).spec_of(model.regression)
    bases = model.regression.bases if isinstance(model.regression, AdditiveRegression) else None
    refitted = fit(
        Y, axes, model.d, spec, model.centering.standardized, manager=manager, bases=bases
    )
    return refitted.model_copy(update={"seed": seed})


def implied_gaussian(model: SlpcaModel) -> Tuple[np.ndarray, np.ndarray]:
    """Marginal mean and covariance of y for a model with a linear restoration map"""
    if model.kind != RegressionKind.LINEAR:
        raise ParameterRangeError("The marginal law is Gaussian only for linear restoration maps")
    reg = model.regression
    Pbar = model.basis.Pbar
    # centered y = x (P + R Pbar) + (mu + eps) Pbar
    A = model.basis.P + reg.coefficients @ Pbar
    mean = model.mu_x @ A + reg.intercept @ Pbar
    covariance = A.T @ np.atleast_2d(model.sigma_x) @ A + model.sigma2 * Pbar.T @ Pbar

    scales = model.centering.scales
    mean = mean * scales + model.centering.means
    covariance = covariance * np.outer(scales, scales)
    return mean, (covariance + covariance.T) / 2
