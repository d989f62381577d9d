import logging
from typing import List

import numpy as np
from scipy.interpolate import BSpline

from slpca.models.spline_basis import BSplineBasis
from slpca.utils.errors import DimensionMismatchError, ParameterRangeError

logger = logging.getLogger(__name__)


def make_basis(degree: int, m: int, lo: float, hi: float) -> BSplineBasis:
    """Clamped uniform B-spline basis with m functions on [lo, hi]"""
    if degree < 0:
        raise ParameterRangeError(f"Spline degree must be >= 0, got {degree}")
    if m < degree + 1:
        raise ParameterRangeError(f"m = {m} basis functions is too few for degree {degree}")
    if not lo < hi:
        raise ParameterRangeError(f"Empty spline domain [{lo}, {hi}]")

    interior = np.linspace(lo, hi, m - degree + 1)[1:-1]
    knots = np.concatenate([np.full(degree + 1, lo), interior, np.full(degree + 1, hi)])
    return BSplineBasis(degree=degree, num_basis=m, knots=knots, lo=float(lo), hi=float(hi))


def basis_matrix(basis: BSplineBasis, x: np.ndarray) -> np.ndarray:
    """Evaluate every basis function at every x; rows are points. x is clamped to the domain."""
    x = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), basis.lo, basis.hi)
    design = BSpline.design_matrix(x, basis.knots, basis.degree, extrapolate=False)
    return design.toarray()


def eval_basis(basis: BSplineBasis, x: float) -> np.ndarray:
    """Values of the m basis functions at a single point"""
    return basis_matrix(basis, np.array([x]))[0]


def design_matrix(bases: List[BSplineBasis], X: np.ndarray) -> np.ndarray:
    """Intercept column followed by one block of basis values per projected coordinate"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != len(bases):
        raise DimensionMismatchError(f"X has {X.shape[1]} columns but {len(bases)} bases were given")
    blocks = [basis_matrix(basis, X[:, j]) for j, basis in enumerate(bases)]
    return np.hstack([np.ones((X.shape[0], 1))] + blocks)


def bases_for(X: np.ndarray, m: int, degree: int) -> List[BSplineBasis]:
    """One basis per column of X, spanning the column's [min, max]"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    bases = []
    for j in range(X.shape[1]):
        lo, hi = float(X[:, j].min()), float(X[:, j].max())
        if not lo < hi:
            raise ParameterRangeError(f"Projected coordinate {j + 1} is constant; cannot place knots")
        bases.append(make_basis(degree, m, lo, hi))
    return bases
