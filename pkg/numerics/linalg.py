"""
Matrix product and ReLU.

The default matmul accumulates the inner dimension left to right, one rank-1
update at a time. Every output entry therefore sees exactly the rounding
sequence of the naive triple loop, which keeps runs bit-reproducible across
machines. The "blas" backend hands the product to numpy's BLAS instead.
"""

import contextlib
import contextvars
from typing import Iterator, Optional

import numpy as np

from config import settings
from utils.errors import ArgumentError, ShapeError

_BACKENDS = ("fixed", "blas")

_backend: contextvars.ContextVar[str] = contextvars.ContextVar(
    "matmul_backend", default=settings.DEFAULT_MATMUL_BACKEND
)


@contextlib.contextmanager
def use_backend(name: Optional[str]) -> Iterator[None]:
    """
    Select the matmul backend for the enclosed block.

    Args:
        name: "fixed" or "blas"; None keeps the current backend
    """
    if name is None:
        yield
        return
    if name not in _BACKENDS:
        raise ArgumentError(f"unknown matmul backend '{name}', expected one of {_BACKENDS}")
    token = _backend.set(name)
    try:
        yield
    finally:
        _backend.reset(token)


def as_matrix(x) -> np.ndarray:
    """View `x` as a 2-D float64 array (1-D input becomes a single row)."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {m.ndim} dimensions")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Matrix product a @ b.

    Args:
        a: (n, k) matrix
        b: (k, m) matrix

    Returns:
        (n, m) product

    Raises:
        ShapeError: if a.cols != b.rows
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError.mismatch("matmul", a.shape, b.shape)

    if _backend.get() == "blas":
        return a @ b

    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.float64)
    term = np.empty_like(out)
    for k in range(a.shape[1]):
        np.multiply(a[:, k:k + 1], b[k:k + 1, :], out=term)
        out += term
    return out


def relu(x: np.ndarray) -> np.ndarray:
    """Elementwise max(0, x)."""
    return np.maximum(x, 0.0)


def relu_grad(x: np.ndarray) -> np.ndarray:
    """1 where x > 0, else 0 (the subgradient at exactly 0 is 0)."""
    return (np.asarray(x) > 0.0).astype(np.float64)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function, evaluated without overflow for large |x|."""
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with the max subtracted first."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=1, keepdims=True)
