"""
Evaluation metrics: accuracy, RMSE and ROC AUC.

AUC is the Mann-Whitney statistic computed from tied (average) ranks, which
counts every tied positive/negative pair as half a win.
"""

from typing import Literal

import numpy as np
from scipy.stats import rankdata

from numerics.linalg import as_matrix
from utils.errors import ArgumentError, ShapeError, UndefinedMetricError

MetricKind = Literal["accuracy", "rmse", "auc"]

METRIC_KINDS = ("accuracy", "rmse", "auc")


def default_metric(task: str) -> MetricKind:
    return "rmse" if task == "regression" else "accuracy"


def positive_scores(outputs: np.ndarray) -> np.ndarray:
    """Score of the positive class: the single sigmoid column, or column 1 of a softmax."""
    out = as_matrix(outputs)
    if out.shape[1] == 1:
        return out[:, 0]
    if out.shape[1] == 2:
        return out[:, 1]
    raise ShapeError(f"AUC needs one or two output columns, got {out.shape[1]}")


def accuracy(outputs: np.ndarray, targets: np.ndarray) -> float:
    """Match rate of argmax (or 0.5-thresholded single column) predictions."""
    out = as_matrix(outputs)
    t = np.asarray(targets).reshape(-1)
    if t.shape[0] != out.shape[0]:
        raise ShapeError.mismatch("accuracy", out.shape, np.shape(targets))
    if out.shape[1] == 1:
        predicted = (out[:, 0] > 0.5).astype(np.int64)
    else:
        predicted = np.argmax(out, axis=1)
    return float(np.mean(predicted == t.astype(np.int64)))


def rmse(outputs: np.ndarray, targets: np.ndarray) -> float:
    out = as_matrix(outputs)
    if np.size(targets) != out.size:
        raise ShapeError.mismatch("rmse", out.shape, np.shape(targets))
    diff = out - np.asarray(targets, dtype=np.float64).reshape(out.shape)
    return float(np.sqrt(np.mean(diff * diff)))


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """
    Area under the ROC curve.

    Args:
        scores: (N,) positive-class scores
        labels: (N,) binary labels, 1 = positive

    Raises:
        UndefinedMetricError: if only one class is present
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if scores.shape[0] != labels.shape[0]:
        raise ShapeError.mismatch("auc", scores.shape, labels.shape)
    positives = labels == 1
    n_pos = int(positives.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC is undefined when the targets contain a single class")
    ranks = rankdata(scores)
    rank_sum = float(ranks[positives].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def metric(kind: MetricKind, outputs: np.ndarray, targets: np.ndarray) -> float:
    """
    Evaluate one metric on linked model outputs.

    Args:
        kind: "accuracy", "rmse" or "auc"
        outputs: (N, out) outputs after the link
        targets: class indices, binary labels or real targets
    """
    if kind == "accuracy":
        return accuracy(outputs, targets)
    if kind == "rmse":
        return rmse(outputs, targets)
    if kind == "auc":
        return auc(positive_scores(outputs), targets)
    raise ArgumentError(f"unknown metric '{kind}', expected one of {METRIC_KINDS}")
