from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from slpca.models.spline_basis import BSplineBasis
from slpca.utils.regression_routing import RegressionKind


def _finite(v, ndim: int) -> np.ndarray:
    array = np.array(v, dtype=float)
    if array.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-D array, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("Regression coefficients must be finite")
    array.setflags(write=False)
    return array


class RegressionSpec(BaseModel):
    """Which restoration map to fit: linear, or additive spline with m basis functions"""

    model_config = ConfigDict(frozen=True)

    kind: RegressionKind = Field(RegressionKind.SPLINE)
    m: Optional[int] = Field(None, ge=1, description="Basis functions per axis (spline only)")
    degree: int = Field(3, ge=0, description="Spline degree (spline only)")

    @model_validator(mode="after")
    def validate_kind(self):
        """Spline specs need m >= degree + 1; linear specs carry no m"""
        if self.kind == RegressionKind.SPLINE:
            if self.m is None:
                raise ValueError("Spline regression requires m")
            if self.m < self.degree + 1:
                raise ValueError(f"m = {self.m} is too small for degree {self.degree}")
        elif self.m is not None:
            raise ValueError("Linear regression does not take m")
        return self

    @property
    def label(self) -> str:
        if self.kind == RegressionKind.LINEAR:
            return "linear"
        return f"spline(m={self.m}, degree={self.degree})"


class LinearRegression(BaseModel):
    """z = intercept + x @ coefficients"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    intercept: np.ndarray = Field(..., description="Length p - d")
    coefficients: np.ndarray = Field(..., description="d x (p - d)")

    @field_validator("intercept", mode="before")
    @classmethod
    def validate_intercept(cls, v):
        return _finite(v, 1)

    @field_validator("coefficients", mode="before")
    @classmethod
    def validate_coefficients(cls, v):
        return _finite(v, 2)

    @model_validator(mode="after")
    def validate_shapes(self):
        if self.coefficients.shape[1] != self.intercept.shape[0]:
            raise ValueError("Coefficient and intercept widths differ")
        return self

    @property
    def kind(self) -> RegressionKind:
        return RegressionKind.LINEAR

    @property
    def d(self) -> int:
        return self.coefficients.shape[0]

    @property
    def output_dim(self) -> int:
        return self.intercept.shape[0]


class AdditiveRegression(BaseModel):
    """z = intercept + sum_j basis_j(x_j) @ blocks[j]

    Each block is m x (p - d). The first row of every block is held at zero:
    it is the column dropped for identifiability, absorbed into the intercept.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    intercept: np.ndarray = Field(..., description="alpha_0, length p - d")
    blocks: List[np.ndarray] = Field(..., description="One m x (p - d) block per axis")
    bases: List[BSplineBasis] = Field(..., description="One basis per axis")

    @field_validator("intercept", mode="before")
    @classmethod
    def validate_intercept(cls, v):
        return _finite(v, 1)

    @field_validator("blocks", mode="before")
    @classmethod
    def validate_blocks(cls, v):
        return [_finite(block, 2) for block in v]

    @model_validator(mode="after")
    def validate_shapes(self):
        """Block shapes follow the bases"""
        if len(self.blocks) != len(self.bases) or not self.blocks:
            raise ValueError("Need one coefficient block per spline basis")
        for j, (block, basis) in enumerate(zip(self.blocks, self.bases)):
            if block.shape != (basis.num_basis, self.intercept.shape[0]):
                raise ValueError(
                    f"Block {j} has shape {block.shape}, expected "
                    f"{(basis.num_basis, self.intercept.shape[0])}"
                )
        return self

    @property
    def kind(self) -> RegressionKind:
        return RegressionKind.SPLINE

    @property
    def d(self) -> int:
        return len(self.blocks)

    @property
    def output_dim(self) -> int:
        return self.intercept.shape[0]

    @property
    def m(self) -> int:
        return self.bases[0].num_basis

    @property
    def degree(self) -> int:
        return self.bases[0].degree
