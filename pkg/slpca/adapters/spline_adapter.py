from typing import List, Optional

import numpy as np

from slpca.adapters.base_adapter import BaseRegressionAdapter
from slpca.models.model_document import RegressionDocument, SplineBasisDocument
from slpca.models.regression import AdditiveRegression, RegressionSpec
from slpca.models.spline_basis import BSplineBasis
from slpca.services import regression_service
from slpca.utils.regression_routing import RegressionKind


class SplineRegressionAdapter(BaseRegressionAdapter):
    """Additive B-spline restoration map z = alpha_0 + sum_j r^j(x_j)"""

    kind = RegressionKind.SPLINE

    def fit(
        self, X: np.ndarray, Z: np.ndarray, spec: RegressionSpec, bases: Optional[List[BSplineBasis]] = None
    ) -> AdditiveRegression:
        try:
            self._check_kind(spec.kind)
            self._check_shapes(X, Z)
            self.log_fit(X, spec)
            return regression_service.fit_additive_spline(X, Z, spec.m, spec.degree, bases=bases)
        except Exception as e:
            self.log_error(e, f"fitting spline map with m = {spec.m}")
            raise

    def coefficient_count(self, d: int, p: int, spec: RegressionSpec) -> int:
        # one column per block is absorbed into the intercept
        return d * (spec.m - 1) * (p - d)

    def to_document(self, regression: AdditiveRegression) -> RegressionDocument:
        return RegressionDocument(
            kind=self.kind,
            intercept=regression.intercept.tolist(),
            blocks=[block.tolist() for block in regression.blocks],
            bases=[
                SplineBasisDocument(
                    degree=basis.degree,
                    num_basis=basis.num_basis,
                    knots=basis.knots.tolist(),
                    lo=basis.lo,
                    hi=basis.hi,
                )
                for basis in regression.bases
            ],
        )

    def from_document(self, document: RegressionDocument) -> AdditiveRegression:
        try:
            self._check_kind(document.kind)
            if document.blocks is None or document.bases is None:
                raise ValueError("Spline regression document needs blocks and bases")
            width = len(document.intercept)
            return AdditiveRegression(
                intercept=document.intercept,
                blocks=[np.array(block, dtype=float).reshape(-1, width) for block in document.blocks],
                bases=[
                    BSplineBasis(
                        degree=basis.degree,
                        num_basis=basis.num_basis,
                        knots=basis.knots,
                        lo=basis.lo,
                        hi=basis.hi,
                    )
                    for basis in document.bases
                ],
            )
        except Exception as e:
            self.log_error(e, "reading spline map")
            raise
