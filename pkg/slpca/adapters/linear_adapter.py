import numpy as np

from slpca.adapters.base_adapter import BaseRegressionAdapter
from slpca.models.model_document import RegressionDocument
from slpca.models.regression import LinearRegression, RegressionSpec
from slpca.services import regression_service
from slpca.utils.regression_routing import RegressionKind


class LinearRegressionAdapter(BaseRegressionAdapter):
    """Linear restoration map z = mu + R'x"""

    kind = RegressionKind.LINEAR

    def fit(self, X: np.ndarray, Z: np.ndarray, spec: RegressionSpec, bases=None) -> LinearRegression:
        try:
            self._check_kind(spec.kind)
            self._check_shapes(X, Z)
            self.log_fit(X, spec)
            return regression_service.fit_linear(X, Z)
        except Exception as e:
            self.log_error(e, "fitting linear map")
            raise

    def coefficient_count(self, d: int, p: int, spec: RegressionSpec) -> int:
        return d * (p - d)

    def to_document(self, regression: LinearRegression) -> RegressionDocument:
        return RegressionDocument(
            kind=self.kind,
            intercept=regression.intercept.tolist(),
            coefficients=regression.coefficients.tolist(),
        )

    def from_document(self, document: RegressionDocument) -> LinearRegression:
        try:
            self._check_kind(document.kind)
            if document.coefficients is None:
                raise ValueError("Linear regression document has no coefficients")
            return LinearRegression(
                intercept=document.intercept,
                coefficients=np.array(document.coefficients, dtype=float).reshape(
                    -1, len(document.intercept)
                ),
            )
        except Exception as e:
            self.log_error(e, "reading linear map")
            raise
