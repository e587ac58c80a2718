"""
Adam optimizer with bias correction.

One AdamState tracks one parameter array; models keep a dict of states keyed
by parameter name.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import settings
from utils.errors import ShapeError


@dataclass
class AdamState:
    """
    Moment estimates and hyperparameters for a single parameter.

    Fields:
        m: first moment, same shape as the parameter
        v: second moment, same shape as the parameter
        t: number of steps taken so far
    """
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = settings.DEFAULT_LR
    beta1: float = settings.ADAM_BETA1
    beta2: float = settings.ADAM_BETA2
    epsilon: float = settings.ADAM_EPSILON

    @classmethod
    def for_param(
        cls,
        param: np.ndarray,
        lr: float = settings.DEFAULT_LR,
        beta1: float = settings.ADAM_BETA1,
        beta2: float = settings.ADAM_BETA2,
        epsilon: float = settings.ADAM_EPSILON,
    ) -> "AdamState":
        return cls(
            m=np.zeros_like(param, dtype=np.float64),
            v=np.zeros_like(param, dtype=np.float64),
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )


def adam_step(param: np.ndarray, grad: np.ndarray, state: AdamState) -> Tuple[np.ndarray, AdamState]:
    """
    Apply one bias-corrected Adam update.

    The parameter array is updated in place and also returned.

    Args:
        param: parameter array
        grad: gradient with the same shape
        state: moments for this parameter (mutated)

    Returns:
        (param, state)
    """
    if param.shape != grad.shape or state.m.shape != param.shape:
        raise ShapeError(
            f"adam_step: param {param.shape}, grad {grad.shape}, state {state.m.shape} must match"
        )
    state.t += 1
    state.m *= state.beta1
    state.m += (1.0 - state.beta1) * grad
    state.v *= state.beta2
    state.v += (1.0 - state.beta2) * grad * grad
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    param -= state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return param, state
