"""
CIFAR-10 binary-format batches, filtered to a two-class task.

Each record is 3073 bytes: one label byte followed by 3072 pixel bytes
(1024 red, 1024 green, 1024 blue, each row-major 32x32).
"""

import logging
from typing import Sequence

import numpy as np

from data.dataset import Dataset
from utils.errors import ArgumentError, RecordSizeError

logger = logging.getLogger(__name__)

PIXELS = 3072
RECORD_SIZE = PIXELS + 1
CHANNELS = ("r", "g", "b")


def parse_cifar_records(raw: bytes, source: str = "<bytes>") -> np.ndarray:
    """(N, 3073) uint8 records from one batch file's bytes."""
    if len(raw) % RECORD_SIZE != 0:
        raise RecordSizeError(
            f"{source}: {len(raw)} bytes is not a whole number of {RECORD_SIZE}-byte records"
        )
    return np.frombuffer(raw, dtype=np.uint8).reshape(-1, RECORD_SIZE)


def feature_names() -> list:
    return [f"{c}{i}" for c in CHANNELS for i in range(PIXELS // len(CHANNELS))]


def load_cifar10_binary(batch_paths: Sequence[str], class_a: int = 3, class_b: int = 4) -> Dataset:
    """
    Load binary batches and keep two classes.

    Args:
        batch_paths: data_batch_*.bin or test_batch.bin files, read in order
        class_a: CIFAR label mapped to 0 (default 3, cat)
        class_b: CIFAR label mapped to 1 (default 4, deer)

    Returns:
        Binary Dataset with 3072 features in [0, 1]

    Raises:
        RecordSizeError: if a file is not a whole number of records
    """
    if class_a == class_b:
        raise ArgumentError(f"class_a and class_b must differ, both are {class_a}")
    if not batch_paths:
        raise ArgumentError("at least one CIFAR batch file is required")

    chunks = []
    for path in batch_paths:
        with open(path, "rb") as f:
            records = parse_cifar_records(f.read(), path)
        keep = (records[:, 0] == class_a) | (records[:, 0] == class_b)
        chunks.append(records[keep])
        logger.debug(f"{path}: {records.shape[0]} records, {int(keep.sum())} kept")

    records = np.concatenate(chunks, axis=0)
    labels = (records[:, 0] == class_b).astype(np.int64)
    features = records[:, 1:].astype(np.float64) / 255.0
    logger.info(
        f"Loaded {features.shape[0]} CIFAR-10 rows for classes {class_a}/{class_b} "
        f"from {len(batch_paths)} batch file(s)"
    )
    return Dataset(features=features, labels=labels, task="binary", feature_names=feature_names())
