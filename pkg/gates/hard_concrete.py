"""
Hard-concrete gates.

A gate holds one log_alpha per input feature. Training draws a stretched,
clamped sample z in [0, 1] with positive mass at exactly 0 and exactly 1;
evaluation uses the deterministic estimator; the penalty is the closed-form
probability that each gate is non-zero.

Noise is drawn once per gate per minibatch and shared by every row.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import settings
from numerics.linalg import sigmoid
from numerics.rng import Rng, rng_uniform
from utils.errors import ArgumentError, ShapeError


@dataclass
class HardConcreteGate:
    """
    Per-feature gate parameters and distribution constants.

    Fields:
        log_alpha: (J,) location parameters, one per input dimension
        beta: temperature, > 0
        gamma: stretch lower bound, < 0
        zeta: stretch upper bound, > 1
    """
    log_alpha: np.ndarray
    beta: float = settings.GATE_BETA
    gamma: float = settings.GATE_GAMMA
    zeta: float = settings.GATE_ZETA

    def __post_init__(self) -> None:
        self.log_alpha = np.asarray(self.log_alpha, dtype=np.float64).reshape(-1)
        if not self.beta > 0:
            raise ArgumentError(f"gate temperature beta must be > 0, got {self.beta}")
        if not (self.gamma < 0 and self.zeta > 1):
            raise ArgumentError(
                f"gate stretch must satisfy gamma < 0 < 1 < zeta, got gamma={self.gamma}, zeta={self.zeta}"
            )
        if not np.all(np.isfinite(self.log_alpha)):
            raise ArgumentError("log_alpha entries must be finite")

    @property
    def dim(self) -> int:
        return int(self.log_alpha.shape[0])

    @property
    def l0_shift(self) -> float:
        """beta * log(-gamma / zeta); the penalty is sigmoid(log_alpha - shift)."""
        return self.beta * float(np.log(-self.gamma / self.zeta))

    def stretch(self, s_bar: np.ndarray) -> np.ndarray:
        return s_bar * (self.zeta - self.gamma) + self.gamma


@dataclass
class GateSample:
    """
    One draw of a gate, kept for the backward pass.

    Fields:
        u: uniform noise
        s_bar: sigmoid output before stretching
        s: stretched value before clamping
        z: min(1, max(0, s))
    """
    u: np.ndarray
    s_bar: np.ndarray
    s: np.ndarray
    z: np.ndarray


def sample_from_noise(gate: HardConcreteGate, u: np.ndarray) -> GateSample:
    """
    Reparameterised sample for given noise.

    Args:
        gate: the gate
        u: (J,) uniform noise in (0, 1)
    """
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    if u.shape[0] != gate.dim:
        raise ShapeError.mismatch("gate sample", (gate.dim,), u.shape)
    s_bar = sigmoid((np.log(u / (1.0 - u)) + gate.log_alpha) / gate.beta)
    s = gate.stretch(s_bar)
    z = np.minimum(1.0, np.maximum(0.0, s))
    return GateSample(u=u, s_bar=s_bar, s=s, z=z)


def sample(gate: HardConcreteGate, rng: Rng) -> GateSample:
    """Draw u in (eps, 1 - eps) from `rng` and sample the gate."""
    eps = settings.GATE_EPSILON
    u = rng_uniform(rng, gate.dim, eps, 1.0 - eps)
    return sample_from_noise(gate, u)


def deterministic(gate: HardConcreteGate) -> np.ndarray:
    """
    Test-time gate values clamp(sigmoid(log_alpha) * (zeta - gamma) + gamma, 0, 1).

    Used for evaluation, reporting and pruning.
    """
    return np.minimum(1.0, np.maximum(0.0, gate.stretch(sigmoid(gate.log_alpha))))


def expected_l0(gate: HardConcreteGate) -> Tuple[float, np.ndarray]:
    """
    Expected number of non-zero gates and its gradient.

    Returns:
        (sum_j p_j, dp/dlog_alpha) where p_j = sigmoid(log_alpha_j - beta * log(-gamma/zeta))
    """
    p = sigmoid(gate.log_alpha - gate.l0_shift)
    return float(np.sum(p)), p * (1.0 - p)


def binary_complement(z: np.ndarray) -> np.ndarray:
    """1.0 where z is exactly 0.0, else 0.0. Treated as constant by backward."""
    return (np.asarray(z) == 0.0).astype(np.float64)


def sample_backward(sample_: GateSample, gate: HardConcreteGate, upstream: np.ndarray) -> np.ndarray:
    """
    Chain dL/dz back to dL/dlog_alpha through a recorded sample.

    The clamp is flat outside 0 < s < 1, so those entries get zero gradient.
    """
    upstream = np.asarray(upstream, dtype=np.float64).reshape(-1)
    inside = (sample_.s > 0.0) & (sample_.s < 1.0)
    dz = (sample_.s_bar * (1.0 - sample_.s_bar)) * (gate.zeta - gate.gamma) / gate.beta
    return np.where(inside, upstream * dz, 0.0)
