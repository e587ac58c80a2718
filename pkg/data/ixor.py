"""
Independent XOR (IXOR) toy dataset.

x1, x2 ~ U[-2, 2] form an XOR pattern; x3 ~ U[0, 1] is linearly separable.
y = 1 iff x1 * x2 > 0 and x3 > 0.5. A GLM can use x3 directly while the XOR
pair needs one hidden layer.
"""

import logging

import numpy as np

from data.dataset import Dataset
from numerics.rng import Rng, rng_uniform
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)

FEATURE_NAMES = ["x1", "x2", "x3"]


def ixor_label(features: np.ndarray) -> np.ndarray:
    """Labels recomputed from an (N, 3) feature matrix."""
    x1, x2, x3 = features[:, 0], features[:, 1], features[:, 2]
    return ((x1 * x2 > 0) & (x3 > 0.5)).astype(np.int64)


def gen_ixor(n: int, seed: int) -> Dataset:
    """
    Generate n IXOR samples.

    Args:
        n: number of rows, at least 1
        seed: stream seed; the same seed always gives the same data

    Returns:
        Binary Dataset with columns x1, x2, x3
    """
    if n < 1:
        raise ArgumentError(f"IXOR needs n >= 1, got {n}")
    rng = Rng(seed)
    x1 = rng_uniform(rng, n, -2.0, 2.0)
    x2 = rng_uniform(rng, n, -2.0, 2.0)
    x3 = rng_uniform(rng, n, 0.0, 1.0)
    features = np.stack([x1, x2, x3], axis=1)
    labels = ixor_label(features)
    logger.info(f"Generated {n} IXOR rows (seed {seed}), positive rate {labels.mean():.3f}")
    return Dataset(features=features, labels=labels, task="binary", feature_names=list(FEATURE_NAMES))
