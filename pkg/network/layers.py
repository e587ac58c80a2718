"""
Hidden ReLU layers and the GLM decision head.
"""

from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np

from numerics.linalg import matmul, sigmoid, softmax
from utils.errors import ArgumentError, ShapeError

Link = Literal["identity", "sigmoid", "softmax"]

_LOSS_FOR_LINK = {
    "identity": "mse",
    "sigmoid": "binary_cross_entropy",
    "softmax": "softmax_cross_entropy",
}


def link_for(task: str, out_dim: int) -> Link:
    """identity for regression, sigmoid for a single binary logit, softmax otherwise."""
    if task == "regression":
        return "identity"
    if task == "binary" and out_dim == 1:
        return "sigmoid"
    if out_dim < 2:
        raise ArgumentError(f"{task} task with {out_dim} output needs at least 2 classes")
    return "softmax"


def loss_kind_for(link: Link) -> str:
    return _LOSS_FOR_LINK[link]


def apply_link(link: Link, logits: np.ndarray) -> np.ndarray:
    if link == "identity":
        return logits
    if link == "sigmoid":
        return sigmoid(logits)
    return softmax(logits)


@dataclass
class HiddenLayer:
    """
    Fully connected ReLU layer.

    Fields:
        weights: (out_dim, in_dim)
        bias: (out_dim,)
    """
    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64).reshape(-1)
        if self.weights.ndim != 2 or self.bias.shape[0] != self.weights.shape[0]:
            raise ShapeError.mismatch("hidden layer", self.weights.shape, self.bias.shape)

    @property
    def in_dim(self) -> int:
        return int(self.weights.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weights.shape[0])

    def pre_activation(self, x: np.ndarray) -> np.ndarray:
        return matmul(x, self.weights.T) + self.bias


@dataclass
class GLMHead:
    """
    Linear decision layer over the concatenated level groups.

    group_offsets has K + 2 entries and splits [0, D) into the K passthrough
    groups followed by the last hidden output, in level order.
    """
    weights: np.ndarray
    bias: np.ndarray
    link: Link
    group_offsets: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64).reshape(-1)
        self.group_offsets = [int(o) for o in self.group_offsets]
        offsets = self.group_offsets
        if self.weights.ndim != 2 or self.bias.shape[0] != self.weights.shape[0]:
            raise ShapeError.mismatch("GLM head", self.weights.shape, self.bias.shape)
        if len(offsets) < 2 or offsets[0] != 0 or offsets[-1] != self.weights.shape[1]:
            raise ShapeError(
                f"GLM head group offsets {offsets} do not partition width {self.weights.shape[1]}"
            )
        if any(b < a for a, b in zip(offsets, offsets[1:])):
            raise ShapeError(f"GLM head group offsets {offsets} must be non-decreasing")

    @property
    def in_dim(self) -> int:
        return int(self.weights.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weights.shape[0])

    @property
    def n_groups(self) -> int:
        return len(self.group_offsets) - 1

    def group_slice(self, level: int) -> slice:
        """Columns of the 1-based level's group."""
        return slice(self.group_offsets[level - 1], self.group_offsets[level])

    def logits(self, glm_input: np.ndarray) -> np.ndarray:
        return matmul(glm_input, self.weights.T) + self.bias
