import logging
from typing import List, Optional, Union

import numpy as np
from scipy import linalg

from slpca.models.regression import AdditiveRegression, LinearRegression
from slpca.models.spline_basis import BSplineBasis
from slpca.services.spline_service import basis_matrix, bases_for, design_matrix
from slpca.utils.errors import DimensionMismatchError, ParameterRangeError, RankDeficientError

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10

Regression = Union[LinearRegression, AdditiveRegression]


def _as_matrices(X, Z):
    X = np.asarray(X, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Z.ndim == 1:
        Z = Z[:, None]
    if X.shape[0] != Z.shape[0]:
        raise DimensionMismatchError(f"X has {X.shape[0]} rows but Z has {Z.shape[0]}")
    return X, Z


def fit_linear(X: np.ndarray, Z: np.ndarray) -> LinearRegression:
    """Least squares z = mu + R'x on centered columns"""
    X, Z = _as_matrices(X, Z)
    n, d = X.shape
    if n <= d:
        raise ParameterRangeError(f"Linear regression needs n > d, got n = {n}, d = {d}")

    mu_x = X.mean(axis=0)
    mu_z = Z.mean(axis=0)
    Xbar = X - mu_x
    Zbar = Z - mu_z

    singular_values = linalg.svdvals(Xbar)
    if singular_values[-1] < RANK_TOLERANCE * max(singular_values[0], np.finfo(float).tiny):
        raise RankDeficientError(
            f"Projected data are rank deficient (singular values {singular_values.tolist()})"
        )

    R, _, _, _ = linalg.lstsq(Xbar, Zbar, lapack_driver="gelsy")
    intercept = mu_z - R.T @ mu_x
    return LinearRegression(intercept=intercept, coefficients=R)


def constrained_design(S: np.ndarray, d: int, m: int) -> np.ndarray:
    """Drop the first basis column of every block so the design has full column rank"""
    keep = [0] + [1 + j * m + l for j in range(d) for l in range(1, m)]
    return S[:, keep]


def fit_additive_spline(
    X: np.ndarray, Z: np.ndarray, m: int, degree: int = 3, bases: Optional[List[BSplineBasis]] = None
) -> AdditiveRegression:
    """Additive B-spline least squares, solved by pivoted QR of the constrained design.

    Without bases, one basis per column of X is placed on the column's range.
    """
    X, Z = _as_matrices(X, Z)
    n, d = X.shape
    if n <= 1 + d * m:
        raise ParameterRangeError(
            f"Additive spline with d = {d}, m = {m} needs more than {1 + d * m} points, got {n}"
        )

    if bases is None:
        bases = bases_for(X, m, degree)
    elif len(bases) != d or any(b.num_basis != m or b.degree != degree for b in bases):
        raise DimensionMismatchError(f"Need {d} bases with m = {m} and degree = {degree}")
    S = constrained_design(design_matrix(bases, X), d, m)

    Q, Rfac, pivots = linalg.qr(S, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(Rfac))
    if diagonal[-1] < RANK_TOLERANCE * diagonal[0]:
        raise RankDeficientError(
            f"Spline design with m = {m} is rank deficient; reduce the number of control points"
        )

    solution = linalg.solve_triangular(Rfac, Q.T @ Z, lower=False)
    beta = np.empty_like(solution)
    beta[pivots] = solution

    blocks = []
    for j in range(d):
        block = np.zeros((m, Z.shape[1]))
        block[1:] = beta[1 + j * (m - 1) : 1 + (j + 1) * (m - 1)]
        blocks.append(block)

    logger.debug(f"Fitted additive spline: d = {d}, m = {m}, degree = {degree}, n = {n}")
    return AdditiveRegression(intercept=beta[0], blocks=blocks, bases=bases)


def predict(reg: Regression, x: np.ndarray) -> np.ndarray:
    """Evaluate the fitted map at one point (length d) or at many (n x d)"""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != reg.d:
        raise DimensionMismatchError(f"Expected points of dimension {reg.d}, got {X.shape[1]}")

    if isinstance(reg, LinearRegression):
        out = reg.intercept + X @ reg.coefficients
    else:
        out = np.tile(reg.intercept, (X.shape[0], 1))
        for j in range(reg.d):
            out = out + basis_matrix(reg.bases[j], X[:, j]) @ reg.blocks[j]
    return out[0] if single else out


def component_curve(reg: AdditiveRegression, j: int, grid: np.ndarray) -> np.ndarray:
    """The j-th additive component r^j on a grid, without the intercept (j is 0-based)"""
    if not isinstance(reg, AdditiveRegression):
        raise ParameterRangeError("Component curves exist only for additive spline regressions")
    if not 0 <= j < reg.d:
        raise ParameterRangeError(f"Axis index must be in [0, {reg.d - 1}], got {j}")
    return basis_matrix(reg.bases[j], np.asarray(grid, dtype=float)) @ reg.blocks[j]
