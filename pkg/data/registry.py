"""
Dataset selection for a run.

Turns a DatasetSpec into (train, test) Datasets, resolving every relative
path against the data directory first.
"""

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from config.schemas import DatasetSpec, RunConfig
from data.cal_housing import NUMERIC_COLUMNS, load_cal_housing
from data.cifar import load_cifar10_binary
from data.dataset import Dataset, read_table, split, split_then_normalize
from data.ixor import gen_ixor
from data.mnist import load_mnist
from storage.paths import resolve_data_path
from utils.errors import DatasetNotFoundError, UsageError

logger = logging.getLogger(__name__)


def resolve_table_path(path: str) -> str:
    """Like resolve_data_path, but "name" also finds "name.csv"."""
    try:
        return resolve_data_path(path)
    except DatasetNotFoundError:
        if Path(path).suffix:
            raise
        try:
            return resolve_data_path(f"{path}.csv")
        except DatasetNotFoundError:
            raise DatasetNotFoundError(path) from None


def _resolve_all(paths: List[str]) -> List[str]:
    return [resolve_data_path(p) for p in paths]


def load_datasets(spec: DatasetSpec, task: str) -> Tuple[Dataset, Dataset]:
    """
    Build the train and test sets described by `spec`.

    Raises:
        DatasetNotFoundError: naming the first missing path
        DataParseError: from the individual loaders
    """
    kind = spec.kind
    if kind == "ixor":
        full = gen_ixor(spec.n_train + spec.n_test, spec.seed)
        rows = np.arange(len(full))
        train, test = full.subset(rows[:spec.n_train]), full.subset(rows[spec.n_train:])

    elif kind == "mnist":
        train = load_mnist(resolve_data_path(spec.train_images), resolve_data_path(spec.train_labels))
        test = load_mnist(resolve_data_path(spec.test_images), resolve_data_path(spec.test_labels))

    elif kind == "cal_housing":
        path = resolve_data_path(spec.csv)
        if spec.normalize_order == "before_split":
            full = load_cal_housing(path, True, spec.target_column, spec.nominal_column)
            train, test = split(full, spec.seed)
        else:
            full = load_cal_housing(path, False, spec.target_column, spec.nominal_column)
            train, test = split_then_normalize(
                full, spec.seed, columns=np.arange(len(NUMERIC_COLUMNS)), standardize_target=True
            )

    elif kind == "cifar_cat_deer":
        train = load_cifar10_binary(_resolve_all(spec.train_batches), spec.class_a, spec.class_b)
        test = load_cifar10_binary(_resolve_all(spec.test_batches), spec.class_a, spec.class_b)

    else:
        train = read_table(resolve_table_path(spec.train_table), task)
        if spec.test_table:
            test = read_table(resolve_table_path(spec.test_table), task)
        else:
            train, test = split(train, spec.seed)

    sources = ", ".join(spec.paths()) or "generated"
    logger.info(
        f"Dataset '{kind}' ({sources}): {len(train)} train rows, {len(test)} test rows, {train.n_features} features"
    )
    return train, test


def load_run_datasets(config: RunConfig) -> Tuple[Dataset, Dataset]:
    """Datasets for a validated run config; the input width must match `arch[0]`."""
    train, test = load_datasets(config.dataset, config.task)
    if train.task != config.task:
        raise UsageError(f"dataset kind '{config.dataset.kind}' is a {train.task} task, config says {config.task}")
    if train.n_features != config.arch[0]:
        raise UsageError(f"arch input width {config.arch[0]} != dataset width {train.n_features}")
    return train, test
