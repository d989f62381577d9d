import logging

import numpy as np
from scipy import linalg

from slpca.models.data_matrix import DataMatrix
from slpca.models.generator import GeneratorKind, GeneratorSpec
from slpca.utils.errors import ParameterRangeError

logger = logging.getLogger(__name__)

COLUMN_NAMES = ["x", "y", "z"]


def helix_points(x: np.ndarray, noise: np.ndarray = None) -> np.ndarray:
    """Rows (x, sin x, cos x), plus optional noise on the last two coordinates"""
    x = np.asarray(x, dtype=float)
    points = np.column_stack([x, np.sin(x), np.cos(x)])
    if noise is not None:
        points[:, 1:] += noise
    return points


def hat_surface(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """cos(pi r / 3) (1 - exp(-64 r^2)) exp(0.2 r) with r = sqrt(x^2 + y^2)"""
    r = np.hypot(x, y)
    return np.cos(np.pi * r / 3) * (1 - np.exp(-64 * r**2)) * np.exp(0.2 * r)


def gen_helix(n: int, sigma_x: float, sigma: float, seed: int) -> DataMatrix:
    """Noisy helix: x ~ N(0, sigma_x^2), noise N(0, sigma^2) on the y and z coordinates"""
    if n < 1:
        raise ParameterRangeError(f"n must be >= 1, got {n}")
    if sigma_x < 0 or sigma < 0:
        raise ParameterRangeError("Standard deviations must be >= 0")
    rng = np.random.default_rng(seed)
    x = sigma_x * rng.standard_normal(n)
    noise = sigma * rng.standard_normal((n, 2))
    logger.info(f"Generated {n} helix points (sigma_x = {sigma_x}, sigma = {sigma}, seed = {seed})")
    return DataMatrix(values=helix_points(x, noise), column_names=COLUMN_NAMES)


def gen_hat(n: int, sigma_x: np.ndarray, sigma: float, seed: int) -> DataMatrix:
    """Noisy hat surface over Gaussian (x, y); noise on z only.

    sigma_x is the symmetric square root of the (x, y) covariance, so a diagonal
    sigma_x holds the standard deviations of x and y.
    """
    if n < 1:
        raise ParameterRangeError(f"n must be >= 1, got {n}")
    if sigma < 0:
        raise ParameterRangeError("Noise standard deviation must be >= 0")
    sigma_x = np.asarray(sigma_x, dtype=float)
    if sigma_x.shape != (2, 2) or not np.allclose(sigma_x, sigma_x.T):
        raise ParameterRangeError("sigma_x must be a symmetric 2 x 2 matrix")
    try:
        linalg.cholesky(sigma_x, lower=True)
    except linalg.LinAlgError:
        raise ParameterRangeError("sigma_x is not positive definite")

    rng = np.random.default_rng(seed)
    # covariance sigma_x' sigma_x = sigma_x^2
    xy = rng.standard_normal((n, 2)) @ sigma_x
    noise = sigma * rng.standard_normal(n)
    z = hat_surface(xy[:, 0], xy[:, 1]) + noise
    logger.info(f"Generated {n} hat points (sigma = {sigma}, seed = {seed})")
    return DataMatrix(values=np.column_stack([xy, z]), column_names=COLUMN_NAMES)


def generate(spec: GeneratorSpec) -> DataMatrix:
    """Dispatch a GeneratorSpec to its generator"""
    if spec.kind == GeneratorKind.HELIX:
        if not isinstance(spec.x_sigma, float):
            raise ParameterRangeError("The helix generator takes a scalar x_sigma")
        return gen_helix(spec.n, spec.x_sigma, spec.noise_sigma, spec.seed)
    if isinstance(spec.x_sigma, float):
        raise ParameterRangeError("The hat generator takes a 2 x 2 x_sigma")
    return gen_hat(spec.n, np.asarray(spec.x_sigma), spec.noise_sigma, spec.seed)
