from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from slpca.models.data_matrix import CenteringInfo
from slpca.models.projection import AxesSource, CompletedBasis
from slpca.models.regression import AdditiveRegression, LinearRegression, RegressionSpec
from slpca.utils.regression_routing import RegressionKind


class FitStatistics(BaseModel):
    """Scores of a fitted model on its training data"""

    gamma: int = Field(..., description="Number of free parameters")
    log_likelihood: Optional[float] = Field(None, description="None when the model is degenerate")
    bic: Optional[float] = Field(None, description="-2 logL + gamma log n; None when degenerate")
    sigma2: float = Field(..., ge=0)
    projected_variances: List[float] = Field(default_factory=list)
    total_inertia: float = Field(0.0, description="Trace of the total covariance")
    degenerate: bool = False


class SlpcaModel(BaseModel):
    """Fitted probabilistic semi-linear auto-associative model"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: CompletedBasis
    regression: Union[LinearRegression, AdditiveRegression]
    mu_x: np.ndarray = Field(..., description="Latent mean, length d")
    sigma_x: np.ndarray = Field(..., description="Latent covariance, d x d")
    sigma2: float = Field(..., ge=0, description="Noise variance on the complement")
    centering: CenteringInfo
    n_train: int = Field(..., ge=1)
    column_names: List[str]
    axes_source: AxesSource = AxesSource.USER
    statistics: Optional[FitStatistics] = None
    seed: Optional[int] = Field(None, description="Generator seed when produced by sampling")

    @field_validator("mu_x", "sigma_x", mode="before")
    @classmethod
    def validate_arrays(cls, v):
        array = np.atleast_1d(np.array(v, dtype=float))
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def validate_latent(self):
        """Shapes agree with d and Sigma_x is symmetric PSD"""
        d = self.basis.d
        sigma_x = np.atleast_2d(self.sigma_x)
        if self.mu_x.shape != (d,) or sigma_x.shape != (d, d):
            raise ValueError(f"Latent parameters do not match d = {d}")
        if np.max(np.abs(sigma_x - sigma_x.T)) > 1e-12 * max(1.0, np.max(np.abs(sigma_x))):
            raise ValueError("sigma_x must be symmetric")
        trace = np.trace(sigma_x)
        if np.min(np.linalg.eigvalsh(sigma_x)) < -1e-10 * max(trace, 1.0):
            raise ValueError("sigma_x must be positive semi-definite")
        if self.regression.d != d or self.regression.output_dim != self.basis.p - d:
            raise ValueError("Regression dimensions do not match the basis")
        if self.centering.p != self.basis.p or len(self.column_names) != self.basis.p:
            raise ValueError("Centering and column names must have p entries")
        return self

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def kind(self) -> RegressionKind:
        return self.regression.kind

    @property
    def m(self) -> Optional[int]:
        return self.regression.m if isinstance(self.regression, AdditiveRegression) else None


class ModelFamily(BaseModel):
    """Candidate grid for model selection"""

    axes_sources: List[AxesSource] = Field(default_factory=lambda: [AxesSource.CONTIGUITY])
    k: int = Field(3, ge=1, description="Neighbors for contiguity analysis")
    d_max: int = Field(..., ge=1)
    include_linear: bool = True
    m_values: List[int] = Field(default_factory=list)
    degree: int = Field(3, ge=0)
    standardize: bool = False

    @model_validator(mode="after")
    def validate_grid(self):
        """m values must support the degree; the family must not be empty"""
        if not self.axes_sources:
            raise ValueError("At least one axes source is required")
        for m in self.m_values:
            if m < self.degree + 1:
                raise ValueError(f"m = {m} is too small for degree {self.degree}")
        if not self.include_linear and not self.m_values:
            raise ValueError("Model family is empty")
        return self

    def candidate_specs(self) -> List[RegressionSpec]:
        specs = []
        if self.include_linear:
            specs.append(RegressionSpec(kind=RegressionKind.LINEAR))
        for m in sorted(set(self.m_values)):
            specs.append(RegressionSpec(kind=RegressionKind.SPLINE, m=m, degree=self.degree))
        return specs


class SelectionRow(BaseModel):
    """One candidate of a selection grid"""

    axes_source: AxesSource
    d: int
    kind: RegressionKind
    m: Optional[int] = None
    gamma: int
    log_likelihood: Optional[float] = None
    bic: Optional[float] = None
    residual_variance: Optional[float] = None
    error: Optional[str] = None

    @property
    def usable(self) -> bool:
        return self.error is None and self.bic is not None


class SelectionReport(BaseModel):
    """All fitted candidates and the index of the minimal-BIC one"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: List[SelectionRow]
    selected: int
    best_model: Optional[SlpcaModel] = Field(None, exclude=True)

    @model_validator(mode="after")
    def validate_selected(self):
        """Selected row has the minimal BIC among usable rows"""
        if not 0 <= self.selected < len(self.rows):
            raise ValueError("Selected index out of range")
        chosen = self.rows[self.selected]
        if not chosen.usable:
            raise ValueError("Selected row did not fit")
        if any(row.usable and row.bic < chosen.bic for row in self.rows):
            raise ValueError("Selected row does not have the minimal BIC")
        return self

    @property
    def selected_row(self) -> SelectionRow:
        return self.rows[self.selected]
