from enum import Enum
from typing import List, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

# Defaults of the two simulated experiments
HELIX_SIGMA_X = 3.0
HELIX_NOISE = 1.0
# standard deviations of (x, y); the covariance is the square of this matrix
HAT_SIGMA_X = [[1.8, 0.0], [0.0, 1.5]]
HAT_NOISE = 0.5


class GeneratorKind(str, Enum):
    HELIX = "helix"
    HAT = "hat"


class GeneratorSpec(BaseModel):
    """Parameters of a synthetic data set"""

    kind: GeneratorKind
    n: int = Field(1000, ge=1)
    noise_sigma: float = Field(..., ge=0)
    x_sigma: Union[float, List[List[float]]] = Field(
        ..., description="helix: sd of x; hat: 2 x 2 scale of (x, y), the square root of its covariance"
    )
    seed: int

    @field_validator("x_sigma")
    @classmethod
    def validate_x_sigma(cls, v):
        """Scalar sd must be >= 0; a matrix must be a 2 x 2 SPD scale"""
        if isinstance(v, (int, float)):
            if v < 0:
                raise ValueError("x_sigma must be >= 0")
            return float(v)
        matrix = np.asarray(v, dtype=float)
        if matrix.shape != (2, 2) or not np.allclose(matrix, matrix.T):
            raise ValueError("x_sigma must be a symmetric 2 x 2 matrix")
        if np.min(np.linalg.eigvalsh(matrix)) <= 0:
            raise ValueError("x_sigma must be positive definite")
        return matrix.tolist()
