import os
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from slpca.models.projection import AxesSource
from slpca.utils.regression_routing import RegressionKind


class Command(str, Enum):
    SIMULATE = "simulate"
    AXES = "axes"
    FIT = "fit"
    SELECT = "select"
    PREDICT = "predict"
    CURVES = "curves"
    SAMPLE = "sample"


class RunConfig(BaseModel):
    """Validated settings of one CLI invocation"""

    command: Command
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    report_path: Optional[str] = None
    refit_path: Optional[str] = None
    model_path: Optional[str] = None
    axes_path: Optional[str] = None
    has_header: bool = True
    delimiter: str = ","
    methods: List[AxesSource] = Field(default_factory=lambda: [AxesSource.CONTIGUITY])
    k: int = Field(3, ge=1)
    d: Optional[int] = Field(None, ge=1)
    d_max: Optional[int] = Field(None, ge=1)
    kind: RegressionKind = RegressionKind.SPLINE
    degree: int = Field(3, ge=0)
    m: Optional[int] = Field(None, ge=1)
    m_values: List[int] = Field(default_factory=list)
    include_linear: bool = True
    standardize: bool = False
    seed: Optional[int] = None
    n: Optional[int] = Field(None, ge=1)
    grid_size: int = Field(101, ge=1)

    @model_validator(mode="after")
    def validate_consistency(self):
        """Flags must agree with each other and outputs must be writable"""
        if self.command == Command.FIT:
            if self.kind == RegressionKind.SPLINE and self.m is None:
                raise ValueError("--m is required for a spline fit")
            if self.kind == RegressionKind.LINEAR and self.m is not None:
                raise ValueError("--m applies only to spline regression")
            if self.m_values:
                raise ValueError("--m-list applies only to select")
        if self.command == Command.SELECT and not self.m_values and not self.include_linear:
            raise ValueError("Nothing to select: give --m-list or allow the linear model")
        if self.m_values and self.kind != RegressionKind.SPLINE:
            raise ValueError("--m-list applies only to spline regression")
        if self.command in (Command.SIMULATE, Command.SAMPLE) and self.seed is None:
            raise ValueError(f"{self.command.value} requires --seed")
        for path in (self.output_path, self.report_path, self.refit_path):
            if path:
                parent = os.path.dirname(os.path.abspath(path))
                if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                    raise ValueError(f"Cannot write to {path}")
        return self
