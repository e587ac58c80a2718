"""Tests for `numerics.linalg`."""

import numpy as np
import pytest

from numerics.linalg import matmul, relu, relu_grad, sigmoid, softmax, use_backend
from numerics.rng import Rng
from utils.errors import ArgumentError, ShapeError


def triple_loop(a, b):
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


@pytest.mark.unit
class TestMatmul:
    """Fixed-order matrix product."""

    def test_identity(self) -> None:
        assert np.array_equal(matmul(np.eye(2), [[3.0], [4.0]]), [[3.0], [4.0]])

    def test_row_times_column(self) -> None:
        assert np.array_equal(matmul([[1.0, 2.0]], [[3.0], [4.0]]), [[11.0]])

    def test_matches_triple_loop_bit_for_bit(self) -> None:
        rng = Rng(3)
        a = rng.normal(20, 0.0, 1.0).reshape(5, 4)
        b = rng.normal(12, 0.0, 1.0).reshape(4, 3)

        assert np.array_equal(matmul(a, b), triple_loop(a, b))

    def test_power_of_two_scalar_commutes(self) -> None:
        rng = Rng(4)
        a = rng.normal(12, 0.0, 1.0).reshape(3, 4)
        b = rng.normal(8, 0.0, 1.0).reshape(4, 2)

        assert np.array_equal(matmul(4.0 * a, b), 4.0 * matmul(a, b))

    def test_shape_mismatch_names_both_shapes(self) -> None:
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 2\)"):
            matmul(np.ones((2, 3)), np.ones((2, 2)))

    def test_blas_backend_agrees_closely(self, mocker) -> None:
        rng = Rng(5)
        a = rng.normal(30, 0.0, 1.0).reshape(5, 6)
        b = rng.normal(18, 0.0, 1.0).reshape(6, 3)
        rank_one = mocker.spy(np, "multiply")

        with use_backend("blas"):
            fast = matmul(a, b)
        assert rank_one.call_count == 0

        slow = matmul(a, b)
        assert rank_one.call_count == 6
        np.testing.assert_allclose(fast, slow, atol=1e-12)

    def test_unknown_backend_rejected(self) -> None:
        with pytest.raises(ArgumentError):
            with use_backend("gpu"):
                pass


@pytest.mark.unit
class TestActivations:
    """ReLU, sigmoid and softmax."""

    def test_relu_and_grad(self) -> None:
        x = np.array([-1.0, 0.0, 2.0])

        assert np.array_equal(relu(x), [0.0, 0.0, 2.0])
        assert np.array_equal(relu_grad(x), [0.0, 0.0, 1.0])

    def test_relu_idempotent(self) -> None:
        x = Rng(6).normal(50, 0.0, 1.0)

        assert np.array_equal(relu(relu(x)), relu(x))

    def test_sigmoid_extremes_stay_finite(self) -> None:
        values = sigmoid(np.array([-1000.0, 0.0, 1000.0]))

        assert np.all(np.isfinite(values))
        assert values[1] == 0.5
        assert values[0] == 0.0 and values[2] == 1.0

    def test_softmax_rows_sum_to_one(self) -> None:
        p = softmax(np.array([[1000.0, 1000.0], [0.0, np.log(3.0)]]))

        np.testing.assert_allclose(p.sum(axis=1), [1.0, 1.0])
        np.testing.assert_allclose(p[1], [0.25, 0.75])
