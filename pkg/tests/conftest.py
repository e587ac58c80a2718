"""
Pytest configuration and shared fixtures for testing.

Provides small networks, fixed gate noise, and tiny dataset files written
with independent writers (struct / plain text), never with the loaders
under test.
"""

import gzip
import struct

import numpy as np
import pytest

from network.model import FeatureLevelNet, init_net
from numerics.rng import Rng


def build_net(arch, task="binary", mode="proposed", seed=0, head_scale=0.5, gate_init=2.3, gate_init_std=0.01):
    """
    Network with random (non-zero) head weights, so every gradient is exercised.

    Args:
        arch: [input, hidden..., output]
    """
    rng = Rng(seed)
    net = init_net(
        arch[0],
        arch[1:-1],
        arch[-1],
        task,
        rng,
        mode=mode,
        gate_init=gate_init,
        gate_init_std=gate_init_std,
    )
    net.head.weights[...] = rng.normal(net.head.weights.size, 0.0, head_scale).reshape(net.head.weights.shape)
    net.head.bias[...] = rng.normal(net.head.out_dim, 0.0, 0.1)
    for layer in net.layers:
        layer.bias[...] = rng.normal(layer.out_dim, 0.0, 0.1)
    return net


def noise_inside_clamp(net: FeatureLevelNet, seed: int = 5, margin: float = 0.05):
    """
    Uniform noise per gate whose samples all land inside (margin, 1 - margin).

    Redraws each entry until the stretched sample is away from both clamp kinks.
    """
    rng = Rng(seed)
    noise = []
    for gate in net.gates:
        u = np.empty(gate.dim)
        for j in range(gate.dim):
            while True:
                candidate = rng.uniform(1, 1e-6, 1 - 1e-6)[0]
                s_bar = 1.0 / (1.0 + np.exp(-(np.log(candidate / (1 - candidate)) + gate.log_alpha[j]) / gate.beta))
                s = s_bar * (gate.zeta - gate.gamma) + gate.gamma
                if margin < s < 1.0 - margin:
                    u[j] = candidate
                    break
        noise.append(u)
    return noise


@pytest.fixture
def make_net():
    """Factory for small random networks."""
    return build_net


@pytest.fixture
def small_net():
    """A 3-5-4-2 proposed binary net with gates near log_alpha = 0."""
    return build_net([3, 5, 4, 2], task="binary", seed=11, gate_init=0.0, gate_init_std=0.5)


@pytest.fixture
def interior_noise():
    """Factory: fixed noise keeping every gate sample inside the clamp."""
    return noise_inside_clamp


@pytest.fixture
def batch():
    """Six rows of three features."""
    return Rng(99).normal(18, 0.0, 1.0).reshape(6, 3)


@pytest.fixture
def write_idx(tmp_path):
    """
    Write an IDX image/label pair with struct.

    Returns a function (images uint8 (N, rows*cols), labels, rows, cols, gz) -> (img_path, lbl_path).
    """
    def _write(images, labels, rows, cols, gz=False, name="fixture"):
        images = np.asarray(images, dtype=np.uint8)
        labels = np.asarray(labels, dtype=np.uint8)
        image_raw = struct.pack(">IIII", 2051, images.shape[0], rows, cols) + bytes(images.reshape(-1).tolist())
        label_raw = struct.pack(">II", 2049, labels.shape[0]) + bytes(labels.tolist())
        suffix = ".gz" if gz else ""
        img_path = tmp_path / f"{name}-images-idx3-ubyte{suffix}"
        lbl_path = tmp_path / f"{name}-labels-idx1-ubyte{suffix}"
        for path, raw in ((img_path, image_raw), (lbl_path, label_raw)):
            if gz:
                with gzip.open(path, "wb") as f:
                    f.write(raw)
            else:
                path.write_bytes(raw)
        return str(img_path), str(lbl_path)

    return _write


@pytest.fixture
def write_cifar(tmp_path):
    """Write CIFAR binary records: list of (label, pixel value) -> path."""
    def _write(records, name="batch.bin"):
        raw = b"".join(bytes([label]) + bytes([value]) * 3072 for label, value in records)
        path = tmp_path / name
        path.write_bytes(raw)
        return str(path)

    return _write


HOUSING_HEADER = (
    "longitude,latitude,housing_median_age,total_rooms,total_bedrooms,"
    "population,households,median_income,median_house_value,ocean_proximity"
)


@pytest.fixture
def write_housing(tmp_path):
    """Write a housing CSV from data lines (header added)."""
    def _write(lines, name="housing.csv"):
        path = tmp_path / name
        path.write_text(HOUSING_HEADER + "\n" + "\n".join(lines) + "\n", encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def housing_lines():
    """Six complete rows covering all five categories."""
    return [
        "-122.23,37.88,41,880,129,322,126,8.3252,452600,NEAR BAY",
        "-122.22,37.86,21,7099,1106,2401,1138,8.3014,358500,NEAR BAY",
        "-118.24,34.05,30,1500,300,900,280,3.5,210000,<1H OCEAN",
        "-119.80,36.75,15,2500,520,1400,480,2.75,95000,INLAND",
        "-118.32,33.35,27,1675,521,744,331,2.1579,450000,ISLAND",
        "-117.20,32.70,35,2100,400,1100,390,4.1,275000,NEAR OCEAN",
    ]
