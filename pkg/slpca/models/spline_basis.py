import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class BSplineBasis(BaseModel):
    """Clamped B-spline basis of a given degree with num_basis functions on [lo, hi]"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    degree: int = Field(..., ge=0)
    num_basis: int = Field(..., ge=1, description="Number of basis functions (control points)")
    knots: np.ndarray = Field(..., description="Nondecreasing knot vector")
    lo: float
    hi: float

    @field_validator("knots", mode="before")
    @classmethod
    def validate_knots(cls, v):
        array = np.array(v, dtype=float)
        if array.ndim != 1:
            raise ValueError("Knot vector must be 1-D")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def validate_clamping(self):
        """Knot count, clamped ends and strictly increasing interior"""
        k = self.degree
        if self.lo >= self.hi:
            raise ValueError(f"Empty spline domain [{self.lo}, {self.hi}]")
        if self.knots.shape[0] != self.num_basis + k + 1:
            raise ValueError(
                f"Expected {self.num_basis + k + 1} knots, got {self.knots.shape[0]}"
            )
        if np.any(self.knots[: k + 1] != self.lo) or np.any(self.knots[-(k + 1):] != self.hi):
            raise ValueError("Knot vector is not clamped to the domain")
        inner = self.knots[k:-k] if k > 0 else self.knots
        if np.any(np.diff(inner) <= 0):
            raise ValueError("Interior knots must be strictly increasing")
        return self
