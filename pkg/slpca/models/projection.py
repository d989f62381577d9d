from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ORTHONORMAL_TOLERANCE = 1e-10


class AxesSource(str, Enum):
    """How the projection axes were obtained"""

    PCA = "pca"
    CONTIGUITY = "contiguity"
    USER = "user-supplied"


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class ContiguityMatrix(BaseModel):
    """Row-wise k-nearest-neighbor indicator, stored as an n x k index table"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    neighbors: np.ndarray = Field(..., description="Row i lists the columns j with m_ij = 1")

    @field_validator("neighbors", mode="before")
    @classmethod
    def validate_neighbors(cls, v):
        array = np.array(v, dtype=np.intp)
        if array.ndim != 2:
            raise ValueError(f"neighbors must be 2-D, got shape {array.shape}")
        return _readonly(array)

    @model_validator(mode="after")
    def validate_graph(self):
        """No self-neighbors and exactly k neighbors per row"""
        if self.neighbors.shape != (self.n, self.k):
            raise ValueError(
                f"Expected neighbor table of shape {(self.n, self.k)}, got {self.neighbors.shape}"
            )
        if np.any(self.neighbors == np.arange(self.n)[:, None]):
            raise ValueError("A point cannot be its own neighbor")
        if np.any((self.neighbors < 0) | (self.neighbors >= self.n)):
            raise ValueError("Neighbor index out of range")
        return self

    def to_dense(self) -> np.ndarray:
        """Boolean n x n matrix with m_ij = 1 iff j is a neighbor of i"""
        dense = np.zeros((self.n, self.n), dtype=bool)
        dense[np.repeat(np.arange(self.n), self.k), self.neighbors.ravel()] = True
        return dense


class ProjectionBasis(BaseModel):
    """Ordered orthonormal projection axes a^1..a^d_max (one per row)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    axes: np.ndarray = Field(..., description="d_max x p, one unit axis per row")
    source: AxesSource = Field(AxesSource.USER)
    eigenvalues: Optional[np.ndarray] = Field(
        None, description="Eigenvalues of the solved problem, in axis order"
    )

    @field_validator("axes", mode="before")
    @classmethod
    def validate_axes(cls, v):
        array = np.atleast_2d(np.array(v, dtype=float))
        if array.ndim != 2 or array.shape[0] > array.shape[1]:
            raise ValueError(f"Axes must be d_max x p with d_max <= p, got {array.shape}")
        gram = array @ array.T
        if np.max(np.abs(gram - np.eye(array.shape[0]))) > ORTHONORMAL_TOLERANCE:
            raise ValueError("Projection axes are not orthonormal")
        return _readonly(array)

    @field_validator("eigenvalues", mode="before")
    @classmethod
    def validate_eigenvalues(cls, v):
        if v is None:
            return None
        return _readonly(np.array(v, dtype=float))

    @property
    def p(self) -> int:
        return self.axes.shape[1]

    @property
    def d_max(self) -> int:
        return self.axes.shape[0]


class CompletedBasis(BaseModel):
    """First d axes P and their orthonormal complement Pbar; Q stacks them"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    P: np.ndarray = Field(..., description="d x p")
    Pbar: np.ndarray = Field(..., description="(p - d) x p")

    @field_validator("P", "Pbar", mode="before")
    @classmethod
    def validate_block(cls, v):
        array = np.array(v, dtype=float)
        if array.ndim != 2:
            raise ValueError(f"Basis blocks must be 2-D, got shape {array.shape}")
        return _readonly(array)

    @model_validator(mode="after")
    def validate_unitary(self):
        """Q Q' must be the identity"""
        if self.P.shape[1] != self.Pbar.shape[1]:
            raise ValueError("P and Pbar must have the same number of columns")
        if self.P.shape[0] + self.Pbar.shape[0] != self.P.shape[1]:
            raise ValueError("P and Pbar together must have p rows")
        Q = self.Q
        if np.max(np.abs(Q @ Q.T - np.eye(self.p))) > ORTHONORMAL_TOLERANCE:
            raise ValueError("Completed basis is not unitary")
        return self

    @property
    def d(self) -> int:
        return self.P.shape[0]

    @property
    def p(self) -> int:
        return self.P.shape[1]

    @property
    def Q(self) -> np.ndarray:
        return np.vstack([self.P, self.Pbar])
