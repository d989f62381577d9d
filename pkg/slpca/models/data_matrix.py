from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_array(values, ndim: int) -> np.ndarray:
    """Copy into a read-only float array of the given rank"""
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-D array, got shape {array.shape}")
    array.setflags(write=False)
    return array


class DataMatrix(BaseModel):
    """Numeric observation table: n rows by p named columns"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray = Field(..., description="n x p observations")
    column_names: List[str] = Field(..., description="One unique label per column")

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v):
        """Require a non-empty finite 2-D array"""
        array = _frozen_array(v, 2)
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"Data matrix must have n >= 1 and p >= 1, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("Data matrix contains NaN or infinite entries")
        return array

    @model_validator(mode="after")
    def validate_column_names(self):
        """Column names must match p and be unique"""
        if len(self.column_names) != self.values.shape[1]:
            raise ValueError(
                f"Expected {self.values.shape[1]} column names, got {len(self.column_names)}"
            )
        if len(set(self.column_names)) != len(self.column_names):
            raise ValueError(f"Column names must be unique: {self.column_names}")
        return self

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_array(cls, values, column_names: List[str] = None) -> "DataMatrix":
        """Build a matrix with generated names V1..Vp when none are given"""
        array = np.atleast_2d(np.asarray(values, dtype=float))
        if column_names is None:
            column_names = default_column_names(array.shape[1])
        return cls(values=array, column_names=list(column_names))


def default_column_names(p: int) -> List[str]:
    return [f"V{j + 1}" for j in range(p)]


class CenteringInfo(BaseModel):
    """Record of the centering (and optional standardization) applied to a data set"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    means: np.ndarray = Field(..., description="Column means")
    scales: np.ndarray = Field(..., description="Column scales, all 1.0 when not standardized")
    standardized: bool = Field(False, description="Whether columns were divided by their sd")

    @field_validator("means", "scales", mode="before")
    @classmethod
    def validate_vector(cls, v):
        return _frozen_array(v, 1)

    @model_validator(mode="after")
    def validate_scales(self):
        """Scales must be strictly positive and match the means"""
        if self.scales.shape != self.means.shape:
            raise ValueError("means and scales must have the same length")
        if np.any(self.scales <= 0):
            raise ValueError("Centering scales must be strictly positive")
        return self

    @property
    def p(self) -> int:
        return self.means.shape[0]

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Center (and scale) raw observations"""
        return (np.asarray(values, dtype=float) - self.means) / self.scales

    def invert(self, values: np.ndarray) -> np.ndarray:
        """Map centered observations back to original units"""
        return np.asarray(values, dtype=float) * self.scales + self.means

    @classmethod
    def identity(cls, p: int) -> "CenteringInfo":
        return cls(means=np.zeros(p), scales=np.ones(p), standardized=False)
