"""
Weight heatmaps as CSV or 8-bit PGM.

PGM pixels map [-max|w|, +max|w|] linearly onto [0, 255], so zero is a
midtone and the sign of a weight is visible at a glance.
"""

import logging
from typing import Literal, Union

import numpy as np
import pandas as pd

from network.model import FeatureLevelNet, PrunedNet
from numerics.linalg import as_matrix
from storage.files import PathLike, atomic_write_bytes, atomic_write_text
from utils.errors import ArgumentError, NumericError

logger = logging.getLogger(__name__)

HeatmapFormat = Literal["csv", "pgm"]


def to_pixels(matrix: np.ndarray) -> np.ndarray:
    """Symmetric linear map of a matrix to uint8 grey levels."""
    m = as_matrix(matrix)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        scale = 1.0
    return np.rint((m / scale + 1.0) * 127.5).astype(np.uint8)


def pgm_bytes(matrix: np.ndarray) -> bytes:
    """Binary (P5) PGM, one pixel per matrix entry, rows top to bottom."""
    pixels = to_pixels(matrix)
    rows, cols = pixels.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes()


def export_heatmap(matrix: np.ndarray, path: PathLike, format: HeatmapFormat = "pgm"):
    """
    Write a weight matrix as a heatmap.

    Args:
        matrix: finite 2-D array
        path: output file
        format: "csv" (raw values) or "pgm" (8-bit greyscale)

    Raises:
        NumericError: if the matrix holds NaN or Inf
    """
    m = as_matrix(matrix)
    if not np.all(np.isfinite(m)):
        raise NumericError("heatmap matrix must be finite")
    if format == "csv":
        atomic_write_text(path, pd.DataFrame(m).to_csv(header=False, index=False, float_format="%.17g"))
    elif format == "pgm":
        atomic_write_bytes(path, pgm_bytes(m))
    else:
        raise ArgumentError(f"unknown heatmap format '{format}', expected csv or pgm")
    logger.info(f"Wrote {m.shape[0]}x{m.shape[1]} {format} heatmap to {path}")


def select_matrix(net: Union[FeatureLevelNet, PrunedNet], layer: str) -> np.ndarray:
    """
    Weight matrix by name.

    Args:
        net: any network
        layer: "head" or a 1-based hidden layer number
    """
    if layer == "head":
        return net.head.weights
    try:
        k = int(layer)
    except ValueError:
        raise ArgumentError(f"layer must be 'head' or a layer number, got '{layer}'") from None
    layers = [level.layer for level in net.levels] if isinstance(net, PrunedNet) else net.layers
    if not 1 <= k <= len(layers):
        raise ArgumentError(f"layer {k} out of range, the net has {len(layers)} hidden layer(s)")
    return layers[k - 1].weights
