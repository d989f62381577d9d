import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Union

import numpy as np

from slpca.models.model_document import RegressionDocument
from slpca.models.regression import AdditiveRegression, LinearRegression, RegressionSpec
from slpca.models.spline_basis import BSplineBasis
from slpca.services import regression_service
from slpca.utils.errors import DimensionMismatchError
from slpca.utils.regression_routing import RegressionKind

logger = logging.getLogger(__name__)

Regression = Union[LinearRegression, AdditiveRegression]


class BaseRegressionAdapter(ABC):
    """Abstract base class for restoration-map adapters"""

    kind: RegressionKind

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}
        self.name = self.__class__.__name__

    @abstractmethod
    def fit(
        self, X: np.ndarray, Z: np.ndarray, spec: RegressionSpec, bases: Optional[List[BSplineBasis]] = None
    ) -> Regression:
        """Estimate the restoration map from projected data; spline maps may reuse given bases"""
        pass

    @abstractmethod
    def coefficient_count(self, d: int, p: int, spec: RegressionSpec) -> int:
        """Free regression coefficients beyond the intercept"""
        pass

    @abstractmethod
    def to_document(self, regression: Regression) -> RegressionDocument:
        """Serialize the fitted map for the model file"""
        pass

    @abstractmethod
    def from_document(self, document: RegressionDocument) -> Regression:
        """Rebuild the fitted map from the model file"""
        pass

    def predict(self, regression: Regression, X: np.ndarray) -> np.ndarray:
        """Evaluate the fitted map on projected points"""
        return regression_service.predict(regression, X)

    def spec_of(self, regression: Regression) -> RegressionSpec:
        """Recover the spec a fitted map was built from"""
        if isinstance(regression, AdditiveRegression):
            return RegressionSpec(kind=RegressionKind.SPLINE, m=regression.m, degree=regression.degree)
        return RegressionSpec(kind=RegressionKind.LINEAR)

    def log_fit(self, X: np.ndarray, spec: RegressionSpec):
        """Log fitting activity"""
        logger.info(f"{self.name} fitting {spec.label} on {X.shape[0]} points, d = {X.shape[1]}")

    def log_error(self, error: Exception, context: str = ""):
        """Log adapter error"""
        logger.error(f"{self.name} error {context}: {error}")

    def _check_kind(self, kind: RegressionKind):
        if kind != self.kind:
            raise ValueError(f"{self.name} cannot handle regression kind '{kind.value}'")

    def _check_shapes(self, X: np.ndarray, Z: np.ndarray):
        if np.ndim(X) != 2 or np.ndim(Z) != 2 or X.shape[0] != Z.shape[0]:
            raise DimensionMismatchError(
                f"Expected X (n x d) and Z (n x (p - d)), got {np.shape(X)} and {np.shape(Z)}"
            )
