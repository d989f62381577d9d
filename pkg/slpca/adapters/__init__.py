# Adapters package
from slpca.adapters.base_adapter import BaseRegressionAdapter
from slpca.adapters.linear_adapter import LinearRegressionAdapter
from slpca.adapters.spline_adapter import SplineRegressionAdapter

__all__ = ["BaseRegressionAdapter", "LinearRegressionAdapter", "SplineRegressionAdapter"]
