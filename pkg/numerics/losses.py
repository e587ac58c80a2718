"""
Batch losses fused with their output links.

Each loss returns the batch-mean value and the gradient with respect to the
pre-link output: logits for the cross-entropy kinds, the raw output for mse.
"""

from typing import Literal, Tuple

import numpy as np

from numerics.linalg import as_matrix, sigmoid, softmax
from utils.errors import NumericError, ShapeError, TargetRangeError

LossKind = Literal["mse", "binary_cross_entropy", "softmax_cross_entropy"]

LOSS_KINDS = ("mse", "binary_cross_entropy", "softmax_cross_entropy")


def class_indices(target: np.ndarray, n_rows: int, n_classes: int) -> np.ndarray:
    """
    Coerce a target array to a vector of integer class indices.

    Raises:
        ShapeError: wrong number of targets
        TargetRangeError: non-integral or out-of-range index
    """
    t = np.asarray(target)
    if t.ndim == 2 and t.shape[1] == 1:
        t = t[:, 0]
    if t.ndim != 1 or t.shape[0] != n_rows:
        raise ShapeError(f"expected {n_rows} class indices, got shape {np.shape(target)}")
    as_float = t.astype(np.float64)
    idx = as_float.astype(np.int64)
    if not np.all(np.isfinite(as_float)) or np.any(idx != as_float):
        raise TargetRangeError("class indices must be integers")
    bad = (idx < 0) | (idx >= n_classes)
    if np.any(bad):
        raise TargetRangeError(
            f"class index {int(idx[bad][0])} outside [0, {n_classes})"
        )
    return idx


def loss_and_grad(kind: LossKind, output: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Mean loss over the batch and its gradient.

    Args:
        kind: "mse", "binary_cross_entropy" or "softmax_cross_entropy"
        output: (N, out) pre-link outputs
        target: (N, out) reals for mse; N values in {0, 1} for binary;
            N class indices for softmax

    Returns:
        (loss, d loss / d output) with the gradient shaped like `output`
    """
    out = as_matrix(output)
    n = out.shape[0]
    if not np.all(np.isfinite(out)):
        raise NumericError(f"{kind}: non-finite values in the model output")

    if kind == "mse":
        if np.size(target) != out.size:
            raise ShapeError.mismatch("mse", out.shape, np.shape(target))
        diff = out - np.asarray(target, dtype=np.float64).reshape(out.shape)
        loss = float(np.sum(diff * diff) / n)
        return loss, 2.0 * diff / n

    if kind == "binary_cross_entropy":
        if out.shape[1] != 1:
            raise ShapeError(f"binary_cross_entropy expects one logit column, got {out.shape[1]}")
        t = np.asarray(target, dtype=np.float64).reshape(-1)
        if t.shape[0] != n:
            raise ShapeError.mismatch("binary_cross_entropy", out.shape, np.shape(target))
        if np.any((t != 0.0) & (t != 1.0)):
            raise TargetRangeError("binary targets must be 0 or 1")
        x = out[:, 0]
        # softplus(x) - t*x written so exp never overflows
        per_row = np.maximum(x, 0.0) - t * x + np.log1p(np.exp(-np.abs(x)))
        grad = ((sigmoid(x) - t) / n).reshape(n, 1)
        return float(np.sum(per_row) / n), grad

    if kind == "softmax_cross_entropy":
        idx = class_indices(target, n, out.shape[1])
        shifted = out - out.max(axis=1, keepdims=True)
        log_norm = np.log(np.sum(np.exp(shifted), axis=1))
        per_row = log_norm - shifted[np.arange(n), idx]
        grad = softmax(out)
        grad[np.arange(n), idx] -= 1.0
        return float(np.sum(per_row) / n), grad / n

    raise ValueError(f"unknown loss kind '{kind}', expected one of {LOSS_KINDS}")
