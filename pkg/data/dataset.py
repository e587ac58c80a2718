"""
The Dataset container, z-score normalization and the seeded train/test split.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from config import settings
from numerics.rng import Rng
from storage.files import atomic_write_text
from utils.errors import ArgumentError, DataParseError, ShapeError

logger = logging.getLogger(__name__)


@dataclass
class NormalizationStats:
    """
    Per-column mean/std used to standardize a dataset.

    Fields:
        columns: indices of the feature columns that were standardized
        mean, std: statistics for those columns
        target_mean, target_std: statistics of a regression target, if standardized
        fitted_on: "all" (before splitting) or "train" (after splitting)
    """
    columns: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    target_mean: Optional[float] = None
    target_std: Optional[float] = None
    fitted_on: str = "all"

    def to_dict(self) -> dict:
        return {
            "columns": [int(c) for c in self.columns],
            "mean": [float(v) for v in self.mean],
            "std": [float(v) for v in self.std],
            "target_mean": self.target_mean,
            "target_std": self.target_std,
            "fitted_on": self.fitted_on,
        }


@dataclass
class Dataset:
    """
    Features, labels and metadata.

    Fields:
        features: (N, d) float64 matrix
        labels: (N,) class indices, 0/1 labels or real targets
        task: "regression", "binary" or "multiclass"
        feature_names: d column names
        stats: normalization statistics, if any were applied
    """
    features: np.ndarray
    labels: np.ndarray
    task: str
    feature_names: List[str] = field(default_factory=list)
    stats: Optional[NormalizationStats] = None

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise ShapeError(f"features must be 2-D, got shape {self.features.shape}")
        self.labels = np.asarray(self.labels).reshape(-1)
        if self.labels.shape[0] != self.features.shape[0]:
            raise ShapeError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if not self.feature_names:
            self.feature_names = [f"x{j + 1}" for j in range(self.features.shape[1])]
        if len(self.feature_names) != self.features.shape[1]:
            raise ShapeError(
                f"{len(self.feature_names)} feature names for {self.features.shape[1]} columns"
            )

    def __len__(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def targets(self) -> np.ndarray:
        """Labels shaped for the loss: (N, 1) reals for regression, (N,) otherwise."""
        if self.task == "regression":
            return self.labels.astype(np.float64).reshape(-1, 1)
        return self.labels.astype(np.int64)

    def subset(self, index: np.ndarray) -> "Dataset":
        return replace(self, features=self.features[index], labels=self.labels[index])


def split(dataset: Dataset, seed: int, train_fraction: float = settings.TRAIN_FRACTION) -> Tuple[Dataset, Dataset]:
    """
    Seeded shuffle, then cut at floor(train_fraction * N).

    Args:
        dataset: at least 5 rows
        seed: shuffle seed
        train_fraction: 0.8 for the 4:1 split

    Returns:
        (train, test), disjoint and together covering every row
    """
    n = len(dataset)
    if n < 5:
        raise ArgumentError(f"split needs at least 5 rows, got {n}")
    order = Rng(seed).permutation(n)
    cut = int(np.floor(train_fraction * n))
    logger.debug(f"Split {n} rows into {cut} train / {n - cut} test (seed {seed})")
    return dataset.subset(order[:cut]), dataset.subset(order[cut:])


def fit_stats(
    dataset: Dataset,
    columns: Optional[np.ndarray] = None,
    standardize_target: bool = False,
    fitted_on: str = "all",
) -> NormalizationStats:
    """Population mean/std of the chosen columns (all columns by default)."""
    if columns is None:
        columns = np.arange(dataset.n_features)
    values = dataset.features[:, columns]
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    target_mean = target_std = None
    if standardize_target:
        y = dataset.labels.astype(np.float64)
        target_mean = float(y.mean())
        target_std = float(y.std()) or 1.0
    return NormalizationStats(
        columns=np.asarray(columns, dtype=np.int64),
        mean=mean,
        std=std,
        target_mean=target_mean,
        target_std=target_std,
        fitted_on=fitted_on,
    )


def normalize(dataset: Dataset, stats: NormalizationStats) -> Dataset:
    """Apply z-scoring with given statistics; returns a new Dataset."""
    features = dataset.features.copy()
    features[:, stats.columns] = (features[:, stats.columns] - stats.mean) / stats.std
    labels = dataset.labels
    if stats.target_mean is not None:
        labels = (labels.astype(np.float64) - stats.target_mean) / stats.target_std
    return replace(dataset, features=features, labels=labels, stats=stats)


def split_then_normalize(
    dataset: Dataset,
    seed: int,
    columns: Optional[np.ndarray] = None,
    standardize_target: bool = False,
) -> Tuple[Dataset, Dataset]:
    """Split raw data, fit statistics on the train part and apply them to both."""
    train, test = split(dataset, seed)
    stats = fit_stats(train, columns, standardize_target, fitted_on="train")
    return normalize(train, stats), normalize(test, stats)


LABEL_COLUMN = "label"


def write_table(dataset: Dataset, path: str) -> None:
    """Write features and labels as a CSV table (full float precision)."""
    frame = pd.DataFrame(dataset.features, columns=dataset.feature_names)
    frame[LABEL_COLUMN] = dataset.labels
    atomic_write_text(path, frame.to_csv(index=False, float_format="%.17g"))
    logger.info(f"Wrote {len(dataset)} rows to {path}")


def read_table(path: str, task: str) -> Dataset:
    """
    Read a CSV table written by `write_table`.

    Raises:
        DataParseError: if the label column is missing or a value is non-numeric
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise DataParseError(f"{path}: {e}") from e
    if LABEL_COLUMN not in frame.columns:
        raise DataParseError(f"{path}: missing '{LABEL_COLUMN}' column")
    names = [c for c in frame.columns if c != LABEL_COLUMN]
    try:
        features = frame[names].to_numpy(dtype=np.float64)
        labels = frame[LABEL_COLUMN].to_numpy(dtype=np.float64)
    except ValueError as e:
        raise DataParseError(f"{path}: non-numeric value ({e})") from e
    if np.isnan(features).any() or np.isnan(labels).any():
        raise DataParseError(f"{path}: empty or non-numeric value")
    if task != "regression":
        labels = labels.astype(np.int64)
    return Dataset(features=features, labels=labels, task=task, feature_names=names)
