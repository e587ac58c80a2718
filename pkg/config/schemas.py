"""
Pydantic schemas for run configuration.

An experiment is one JSON file validated into a RunConfig; command-line flags
override individual fields before validation. The validated config, with
defaults applied, is embedded in every checkpoint and report.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import settings
from utils.errors import UsageError

TaskKind = Literal["regression", "binary", "multiclass"]


class GateConstants(BaseModel):
    """
    Hard-concrete distribution constants.

    gamma < 0 < 1 < zeta puts positive probability on exact 0 and exact 1.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    beta: float = Field(default=settings.GATE_BETA, gt=0, description="Temperature")
    gamma: float = Field(default=settings.GATE_GAMMA, lt=0, description="Stretch lower bound")
    zeta: float = Field(default=settings.GATE_ZETA, gt=1, description="Stretch upper bound")


class TrainConfig(BaseModel):
    """
    Optimization settings for one training run.

    `lambda` is a Python keyword, so the field is `lam` with a `lambda` alias;
    both spellings are accepted in JSON.
    """
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: float = Field(default=0.1, ge=0, alias="lambda", description="L0 penalty weight")
    lr: float = Field(default=settings.DEFAULT_LR, ge=0, description="Adam learning rate")
    gate_lr: Optional[float] = Field(default=None, ge=0, description="Adam learning rate for log_alpha (default: lr)")
    lr_decay_start: float = Field(
        default=1.0,
        ge=0,
        le=1,
        description="Fraction of the run after which every learning rate decays linearly (1.0: constant)",
    )
    routing_grad_weight: float = Field(
        default=0.0,
        ge=0,
        description="Weight of the zero-crossing term added to the log_alpha gradient (0: off)",
    )
    batch_size: int = Field(default=settings.DEFAULT_BATCH_SIZE, ge=1)
    iterations: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    lambda_warmup_iters: Optional[int] = Field(
        default=None,
        ge=0,
        description="Iterations over which lambda ramps linearly from 0 (default: 10% of iterations)",
    )
    eval_every: int = Field(default=settings.DEFAULT_EVAL_EVERY, ge=1)
    gate_init: float = Field(default=settings.DEFAULT_GATE_INIT, description="Mean initial log_alpha")
    gate_init_std: float = Field(default=settings.DEFAULT_GATE_INIT_STD, ge=0)
    gate_constants: GateConstants = Field(default_factory=GateConstants)
    beta1: float = Field(default=settings.ADAM_BETA1, ge=0, lt=1)
    beta2: float = Field(default=settings.ADAM_BETA2, ge=0, lt=1)
    epsilon: float = Field(default=settings.ADAM_EPSILON, gt=0)
    matmul: Literal["fixed", "blas"] = Field(
        default=settings.DEFAULT_MATMUL_BACKEND,
        description="fixed: bit-reproducible accumulation order; blas: faster, reproducible to ~1e-10",
    )

    @field_validator("gate_init")
    def gate_init_finite(cls, v):
        """log_alpha must start finite."""
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError("gate_init must be finite")
        return v

    @property
    def warmup_iters(self) -> int:
        if self.lambda_warmup_iters is not None:
            return self.lambda_warmup_iters
        return int(self.iterations * settings.DEFAULT_WARMUP_FRACTION)

    def lambda_at(self, iteration: int) -> float:
        """Penalty weight in effect at a 1-based iteration."""
        warmup = self.warmup_iters
        if warmup == 0 or iteration >= warmup:
            return self.lam
        return self.lam * iteration / warmup

    def lr_scale_at(self, iteration: int) -> float:
        """Multiplier on every learning rate at a 1-based iteration."""
        start = self.lr_decay_start
        progress = iteration / self.iterations
        if start >= 1.0 or progress <= start:
            return 1.0
        return 1.0 - (1.0 - settings.LR_DECAY_FLOOR) * (progress - start) / (1.0 - start)


DatasetKind = Literal["ixor", "mnist", "cal_housing", "cifar_cat_deer", "table"]

_REQUIRED_BY_KIND: Dict[str, List[str]] = {
    "ixor": [],
    "mnist": ["train_images", "train_labels", "test_images", "test_labels"],
    "cal_housing": ["csv"],
    "cifar_cat_deer": ["train_batches", "test_batches"],
    "table": ["train_table"],
}


class DatasetSpec(BaseModel):
    """
    Where a run's data comes from.

    Only the fields of the selected `kind` are used; the rest stay None.
    """
    model_config = ConfigDict(extra="forbid")

    kind: DatasetKind
    seed: int = Field(default=0, ge=0, description="Seed for generation and splitting")

    # ixor
    n_train: int = Field(default=8000, ge=1)
    n_test: int = Field(default=2000, ge=1)

    # mnist
    train_images: Optional[str] = None
    train_labels: Optional[str] = None
    test_images: Optional[str] = None
    test_labels: Optional[str] = None

    # cal_housing
    csv: Optional[str] = None
    target_column: str = "median_house_value"
    nominal_column: str = "ocean_proximity"
    normalize_order: Literal["before_split", "after_split"] = "before_split"

    # cifar_cat_deer
    train_batches: Optional[List[str]] = None
    test_batches: Optional[List[str]] = None
    class_a: int = Field(default=3, ge=0, le=9)
    class_b: int = Field(default=4, ge=0, le=9)

    # table (CSV written by gen-ixor)
    train_table: Optional[str] = None
    test_table: Optional[str] = None

    @model_validator(mode="after")
    def kind_fields_present(self):
        """Each dataset kind names the files it needs."""
        for key in _REQUIRED_BY_KIND[self.kind]:
            if getattr(self, key) in (None, []):
                raise ValueError(f"dataset kind '{self.kind}' requires '{key}'")
        if self.class_a == self.class_b:
            raise ValueError("class_a and class_b must differ")
        return self

    def paths(self) -> List[str]:
        """All file paths this spec references."""
        found: List[str] = []
        for key in ("train_images", "train_labels", "test_images", "test_labels",
                    "csv", "train_table", "test_table"):
            value = getattr(self, key)
            if value:
                found.append(value)
        for key in ("train_batches", "test_batches"):
            found.extend(getattr(self, key) or [])
        return found


class OutputSpec(BaseModel):
    """Where a training run writes its artifacts."""
    model_config = ConfigDict(extra="forbid")

    dir: str = "runs"
    checkpoint: str = "model.json"
    history: str = "history.csv"

    def checkpoint_path(self) -> Path:
        return Path(self.dir) / self.checkpoint

    def history_path(self) -> Path:
        return Path(self.dir) / self.history


class RunConfig(BaseModel):
    """
    One experiment: data, architecture, mode and optimization settings.

    `arch` is the full initial architecture including input and output
    widths, e.g. [3, 16, 8, 2] for "3-16-8-2".
    """
    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    task: TaskKind
    dataset: DatasetSpec
    arch: List[int]
    mode: Literal["proposed", "baseline"] = "proposed"
    metric: Optional[Literal["accuracy", "rmse", "auc"]] = Field(
        default=None, description="Held-out metric (default: rmse for regression, accuracy otherwise)"
    )
    train: TrainConfig = Field(default_factory=TrainConfig)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("arch")
    def arch_has_hidden_layer(cls, v):
        """Input, at least one hidden layer, output; all widths positive."""
        if len(v) < 3:
            raise ValueError("arch needs input, at least one hidden layer and output widths")
        if any(width < 1 for width in v):
            raise ValueError("arch widths must be positive")
        return v

    @property
    def hidden(self) -> List[int]:
        return list(self.arch[1:-1])

    @property
    def out_dim(self) -> int:
        return self.arch[-1]

    @property
    def metric_kind(self) -> str:
        if self.metric:
            return self.metric
        return "rmse" if self.task == "regression" else "accuracy"

    def effective(self) -> Dict[str, Any]:
        """JSON-ready dict with every default applied."""
        return self.model_dump(mode="json", by_alias=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise usage_error_from(e) from e


def usage_error_from(error: ValidationError) -> UsageError:
    """Turn a pydantic validation error into a UsageError naming the field."""
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "config"
    if first["type"] == "missing":
        return UsageError(f"missing config key: {location}")
    if first["type"] == "extra_forbidden":
        return UsageError(f"unknown config key: {location}")
    return UsageError(f"invalid config value for {location}: {first['msg']}")
