# -*- coding: utf-8 -*-
"""Validated configuration models (pydantic v2)."""
import os
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from utils import constants


class AdmmSettings(BaseModel):
    """Solver settings for the per-label lasso (correlation learning)."""
    model_config = ConfigDict(frozen=True)

    rho: float = Field(constants.DEFAULT_RHO, gt=0)
    tol_abs: float = Field(constants.DEFAULT_ADMM_TOL_ABS, gt=0)
    tol_rel: float = Field(constants.DEFAULT_ADMM_TOL_REL, ge=0)
    max_iter: int = Field(constants.DEFAULT_ADMM_MAX_ITER, ge=1)
    # fixed lambda for every column; None means the per-column heuristic
    lambda_override: Optional[float] = Field(None, ge=0)
    lambda_scale: float = Field(constants.DEFAULT_LAMBDA_SCALE, ge=0)


class TrainerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda1: float = Field(constants.DEFAULT_LAMBDA1, gt=0)
    lambda2: float = Field(constants.DEFAULT_LAMBDA2, gt=0)
    alpha: float = Field(constants.DEFAULT_ALPHA, ge=0, le=1)
    outer_tol: float = Field(constants.DEFAULT_OUTER_TOL, gt=0)
    max_outer_iter: int = Field(constants.DEFAULT_MAX_OUTER_ITER, ge=1)
    admm: AdmmSettings = Field(default_factory=AdmmSettings)

    def with_point(self, point: "GridPoint") -> "TrainerConfig":
        return self.model_copy(update={"alpha": point.alpha, "lambda2": point.lambda2})


class GridPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0, le=1)
    lambda2: float = Field(gt=0)

    def sort_key(self) -> Tuple[float, float]:
        # tie-break order: smaller alpha first, then smaller lambda2
        return (self.alpha, self.lambda2)


class Grid(BaseModel):
    model_config = ConfigDict(frozen=True)

    alphas: List[float] = Field(default_factory=lambda: list(constants.DEFAULT_ALPHA_GRID))
    lambda2s: List[float] = Field(default_factory=lambda: list(constants.DEFAULT_LAMBDA2_GRID))
    lambda1: float = Field(constants.DEFAULT_LAMBDA1, gt=0)

    @field_validator("alphas")
    @classmethod
    def _alphas_in_range(cls, values: List[float]) -> List[float]:
        for a in values:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha {a} outside [0, 1]")
        return values

    @field_validator("lambda2s")
    @classmethod
    def _lambda2s_positive(cls, values: List[float]) -> List[float]:
        for v in values:
            if v <= 0:
                raise ValueError(f"lambda2 {v} must be positive")
        return values

    def points(self) -> List[GridPoint]:
        """All (alpha, lambda2) combinations in tie-break order."""
        return sorted(
            (GridPoint(alpha=a, lambda2=l2) for a in self.alphas for l2 in self.lambda2s),
            key=GridPoint.sort_key,
        )

    def __len__(self) -> int:
        return len(self.alphas) * len(self.lambda2s)


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, resolved and checked before execution."""
    subcommand: Literal["corr", "train", "predict", "eval", "cv", "sweep", "describe"]
    inputs: Dict[str, Path] = Field(default_factory=dict)
    trainer: TrainerConfig = Field(default_factory=TrainerConfig)
    grid: Optional[Grid] = None
    seed: int = Field(constants.DEFAULT_SEED, ge=0)
    output_dir: Path = Path(".")
    jobs: int = Field(constants.DEFAULT_JOBS, ge=1)
    output_format: Literal["text", "structured"] = constants.DEFAULT_OUTPUT_FORMAT
    folds: int = Field(constants.DEFAULT_FOLDS, ge=2)
    inner_folds: int = Field(constants.DEFAULT_INNER_FOLDS, ge=2)
    selection_metric: str = constants.DEFAULT_SELECTION_METRIC

    @field_validator("inputs")
    @classmethod
    def _inputs_readable(cls, inputs: Dict[str, Path]) -> Dict[str, Path]:
        resolved = {}
        for role, path in inputs.items():
            path = Path(path).expanduser().resolve()
            if not path.is_file():
                raise ValueError(f"{role} file not found: {path}")
            if not os.access(path, os.R_OK):
                raise ValueError(f"{role} file is not readable: {path}")
            resolved[role] = path
        return resolved

    @field_validator("selection_metric")
    @classmethod
    def _known_metric(cls, metric: str) -> str:
        if metric not in constants.METRIC_NAMES:
            raise ValueError(f"unknown metric '{metric}'; choose from {', '.join(constants.METRIC_NAMES)}")
        return metric

    @model_validator(mode="after")
    def _resolve_output_dir(self) -> "RunConfig":
        self.output_dir = Path(self.output_dir).expanduser().resolve()
        return self
