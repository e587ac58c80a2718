"""
Pydantic schemas for report documents.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator


class MetricValue(BaseModel):
    """A metric evaluated on a dataset."""
    kind: str = Field(..., description="accuracy, rmse or auc")
    value: float


class LevelStats(BaseModel):
    """
    Statistics of one GLM input group.

    Levels 1..K are the passthrough groups in front of each hidden layer;
    the last level is the final hidden output, which has no gate.
    """
    level: int = Field(..., ge=1)
    size: int = Field(..., ge=0, description="Inputs at this level (the group width before pruning)")
    routed: int = Field(..., ge=0, description="Columns routed to the GLM (gate exactly 0)")
    percent: float = Field(..., description="routed / size * 100")
    aav: Optional[float] = Field(
        default=None, description="Mean |GLM weight| over the selected columns; absent if none"
    )
    gated: bool = Field(default=True, description="False for the final hidden group")

    @field_validator("percent")
    def percent_in_range(cls, v):
        """Percentages stay within [0, 100]."""
        if not 0.0 <= v <= 100.0:
            raise ValueError(f"percent must be in [0, 100], got {v}")
        return v

    @field_validator("aav")
    def aav_non_negative(cls, v):
        if v is not None and v < 0:
            raise ValueError(f"AAV must be >= 0, got {v}")
        return v


class RoutedFeature(BaseModel):
    """An input feature sent straight to the GLM at level 1."""
    name: str
    index: int
    weights: List[float] = Field(..., description="GLM weight per output")


class LevelReport(BaseModel):
    """Interpretability report for one trained network on one dataset."""
    metric: MetricValue
    architecture: str
    effective_glm_width: int
    mode: str
    levels: List[LevelStats]
    routed_features: List[RoutedFeature] = Field(default_factory=list)
    normalization: Optional[str] = Field(
        default=None, description="'all' (before splitting) or 'train' (after splitting)"
    )
    config: Optional[Dict[str, Any]] = None
