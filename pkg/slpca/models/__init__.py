# Models package
from .data_matrix import CenteringInfo, DataMatrix
from .generator import GeneratorKind, GeneratorSpec
from .projection import AxesSource, CompletedBasis, ContiguityMatrix, ProjectionBasis
from .regression import AdditiveRegression, LinearRegression, RegressionSpec
from .run_config import Command, RunConfig
from .slpca_model import FitStatistics, ModelFamily, SelectionReport, SelectionRow, SlpcaModel
from .spline_basis import BSplineBasis

__all__ = [
    "AdditiveRegression",
    "AxesSource",
    "BSplineBasis",
    "CenteringInfo",
    "Command",
    "CompletedBasis",
    "ContiguityMatrix",
    "DataMatrix",
    "FitStatistics",
    "GeneratorKind",
    "GeneratorSpec",
    "LinearRegression",
    "ModelFamily",
    "ProjectionBasis",
    "RegressionSpec",
    "RunConfig",
    "SelectionReport",
    "SelectionRow",
    "SlpcaModel",
]
