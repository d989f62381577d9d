from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from slpca.models.projection import AxesSource
from slpca.models.slpca_model import FitStatistics
from slpca.utils.regression_routing import RegressionKind

FORMAT_VERSION = "1.0"


class CenteringDocument(BaseModel):
    means: List[float]
    scales: List[float]
    standardized: bool


class SplineBasisDocument(BaseModel):
    degree: int
    num_basis: int
    knots: List[float]
    lo: float
    hi: float
    extrapolation: Literal["clamp"] = Field(
        "clamp", description="Points outside [lo, hi] are clamped to the domain"
    )


class RegressionDocument(BaseModel):
    """Restoration map coefficients; the populated fields depend on kind"""

    kind: RegressionKind
    intercept: List[float]
    coefficients: Optional[List[List[float]]] = Field(None, description="linear: d x (p - d)")
    blocks: Optional[List[List[List[float]]]] = Field(
        None, description="spline: d blocks of m x (p - d), first row fixed at 0"
    )
    bases: Optional[List[SplineBasisDocument]] = None


class ModelDocument(BaseModel):
    """Self-describing model file"""

    format_version: Literal["1.0"] = FORMAT_VERSION
    column_names: List[str]
    axes_source: AxesSource
    d: int
    p: int
    axes: List[List[float]] = Field(..., description="P, one axis per row")
    complement: List[List[float]] = Field(..., description="Pbar, one axis per row")
    regression: RegressionDocument
    mu_x: List[float]
    sigma_x: List[List[float]]
    sigma2: float
    n_train: int
    centering: CenteringDocument
    statistics: Optional[FitStatistics] = None
    seed: Optional[int] = None


class AxesDocument(BaseModel):
    """Axes file written by the axes command"""

    format_version: Literal["1.0"] = FORMAT_VERSION
    source: AxesSource
    column_names: List[str]
    standardized: bool
    k: Optional[int] = None
    axes: List[List[float]]
    eigenvalues: Optional[List[float]] = None
