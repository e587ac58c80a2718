"""
Forward and backward passes.

For each level k = 1..K with gate values z_k and previous hidden output
h_{k-1} (h_0 is the input batch):

    passthrough_k = B(z_k) * h_{k-1}     routed straight to the GLM head
    gated_k       = z_k * h_{k-1}        fed to hidden layer k
    h_k           = relu(W_k gated_k + b_k)

The head sees concat(passthrough_1, ..., passthrough_K, h_K). B(z) is 1
only where z is exactly 0, so a feature reaches the head through at most one
path. Backward treats B(z) as constant and the clamp as flat outside (0, 1).
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from gates.hard_concrete import (
    GateSample,
    binary_complement,
    deterministic,
    expected_l0,
    sample,
    sample_backward,
    sample_from_noise,
)
from network.layers import apply_link, loss_kind_for
from network.model import FeatureLevelNet, PrunedNet
from numerics.linalg import as_matrix, matmul, relu, relu_grad
from numerics.losses import loss_and_grad
from numerics.rng import Rng
from utils.errors import ArgumentError, ShapeError

Gradients = Dict[str, np.ndarray]


@dataclass
class ForwardCache:
    """Every intermediate of one training forward pass."""
    batch: np.ndarray
    samples: List[GateSample]
    complements: List[np.ndarray]
    hidden: List[np.ndarray]        # h_0 .. h_K
    gated: List[np.ndarray]         # input of layer k
    pre: List[np.ndarray]           # pre-activation of layer k
    glm_input: np.ndarray
    logits: np.ndarray
    output: np.ndarray
    lam: float = 0.0
    data_loss: Optional[float] = None
    penalty: float = 0.0


def _check_batch(net: Union[FeatureLevelNet, PrunedNet], batch: np.ndarray) -> np.ndarray:
    x = as_matrix(batch)
    if x.shape[1] != net.input_dim:
        raise ShapeError(f"batch has {x.shape[1]} columns, network expects {net.input_dim}")
    return x


def _propagate(net: FeatureLevelNet, x: np.ndarray, zs: Sequence[np.ndarray]) -> Tuple[
    List[np.ndarray], List[np.ndarray], List[np.ndarray], List[np.ndarray], np.ndarray
]:
    """Run the gated composition for fixed gate values (ones for a baseline net)."""
    hidden = [x]
    gated: List[np.ndarray] = []
    pre: List[np.ndarray] = []
    complements: List[np.ndarray] = []
    passthrough: List[np.ndarray] = []
    h = x
    for k, layer in enumerate(net.layers):
        if net.is_baseline:
            g = h
        else:
            z = zs[k]
            b = binary_complement(z)
            complements.append(b)
            passthrough.append(h * b)
            g = h * z
        a = layer.pre_activation(g)
        h = relu(a)
        gated.append(g)
        pre.append(a)
        hidden.append(h)
    glm_input = np.concatenate(passthrough + [h], axis=1)
    return hidden, gated, pre, complements, glm_input


def forward_train(
    net: FeatureLevelNet,
    batch: np.ndarray,
    rng: Optional[Rng] = None,
    noise: Optional[Sequence[np.ndarray]] = None,
) -> Tuple[np.ndarray, ForwardCache]:
    """
    Training forward pass with sampled gates.

    One GateSample is drawn per gate and shared by every row of the batch.

    Args:
        net: the network
        batch: (N, input_dim) features
        rng: noise source; ignored when `noise` is given
        noise: optional fixed uniform noise per gate (reproducible samples)

    Returns:
        (output, cache) where output has the head link applied
    """
    x = _check_batch(net, batch)
    samples: List[GateSample] = []
    if not net.is_baseline:
        if noise is not None:
            if len(noise) != net.depth:
                raise ArgumentError(f"expected noise for {net.depth} gates, got {len(noise)}")
            samples = [sample_from_noise(gate, u) for gate, u in zip(net.gates, noise)]
        elif rng is not None:
            samples = [sample(gate, rng) for gate in net.gates]
        else:
            raise ArgumentError("forward_train needs an rng or fixed gate noise")

    zs = [s.z for s in samples]
    hidden, gated, pre, complements, glm_input = _propagate(net, x, zs)
    logits = net.head.logits(glm_input)
    output = apply_link(net.head.link, logits)
    cache = ForwardCache(
        batch=x,
        samples=samples,
        complements=complements,
        hidden=hidden,
        gated=gated,
        pre=pre,
        glm_input=glm_input,
        logits=logits,
        output=output,
    )
    return output, cache


def eval_glm_input(net: Union[FeatureLevelNet, PrunedNet], batch: np.ndarray) -> np.ndarray:
    """GLM head input at deterministic gate values."""
    x = _check_batch(net, batch)
    if isinstance(net, PrunedNet):
        parts: List[np.ndarray] = []
        h = x
        for level in net.levels:
            parts.append(h[:, level.passthrough_index])
            h = relu(level.layer.pre_activation(h[:, level.hidden_index]))
        parts.append(h)
        return np.concatenate(parts, axis=1)
    zs = [deterministic(gate) for gate in net.gates]
    return _propagate(net, x, zs)[-1]


def eval_logits(net: Union[FeatureLevelNet, PrunedNet], batch: np.ndarray) -> np.ndarray:
    return net.head.logits(eval_glm_input(net, batch))


def forward_eval(net: Union[FeatureLevelNet, PrunedNet], batch: np.ndarray) -> np.ndarray:
    """
    Evaluation forward pass with deterministic gates.

    No randomness and no cache; repeated calls are bit-identical. Accepts
    pruned nets as well.
    """
    return apply_link(net.head.link, eval_logits(net, batch))


def penalty_and_grads(net: FeatureLevelNet, lam: float) -> Tuple[float, List[np.ndarray]]:
    """(lam / K) * sum_k expected_l0(gate_k) and its per-gate gradients."""
    if net.is_baseline or lam == 0.0:
        return 0.0, [np.zeros(g.dim) for g in net.gates]
    scale = lam / net.depth
    total = 0.0
    grads: List[np.ndarray] = []
    for gate in net.gates:
        value, dp = expected_l0(gate)
        total += value
        grads.append(scale * dp)
    return scale * total, grads


def objective(
    net: FeatureLevelNet,
    batch: np.ndarray,
    targets: np.ndarray,
    rng: Optional[Rng] = None,
    lam: float = 0.0,
    noise: Optional[Sequence[np.ndarray]] = None,
) -> Tuple[float, ForwardCache]:
    """
    Mean data loss plus (lam / K) times the summed expected L0 of every gate.

    Returns:
        (objective value, cache ready for `backward`)
    """
    if lam < 0:
        raise ArgumentError(f"lambda must be >= 0, got {lam}")
    _, cache = forward_train(net, batch, rng=rng, noise=noise)
    data_loss, _ = loss_and_grad(loss_kind_for(net.head.link), cache.logits, targets)
    penalty, _ = penalty_and_grads(net, lam)
    cache.lam = lam
    cache.data_loss = data_loss
    cache.penalty = penalty
    return data_loss + penalty, cache


def backward(
    net: FeatureLevelNet,
    cache: ForwardCache,
    targets: np.ndarray,
    routing_weight: float = 0.0,
) -> Gradients:
    """
    Reverse-mode gradients of the objective for every parameter.

    The hidden path z * h carries gradient into z; the passthrough path
    B(z) * h carries none into z. h_{k-1} receives gradient from both paths.
    log_alpha additionally receives the closed-form penalty gradient.

    With routing_weight > 0, log_alpha also gets the zero-crossing term: the
    rate dP(s > 0)/dlog_alpha = p(1 - p) times the first-order loss change of
    sending h_{k-1} to the head, sum over rows of dL/dglm_k * h_{k-1}. B(z)
    itself still has zero derivative, so gradients at routing_weight = 0
    are exact for the sampled noise.

    Returns:
        gradients keyed like `net.parameters()`
    """
    _, dlogits = loss_and_grad(loss_kind_for(net.head.link), cache.logits, targets)
    grads: Gradients = {
        "head.weights": matmul(dlogits.T, cache.glm_input),
        "head.bias": dlogits.sum(axis=0),
    }
    d_glm = matmul(dlogits, net.head.weights)
    dh = d_glm[:, net.head.group_slice(net.head.n_groups)]
    _, penalty_grads = penalty_and_grads(net, cache.lam)

    for k in reversed(range(net.depth)):
        layer = net.layers[k]
        da = dh * relu_grad(cache.pre[k])
        grads[f"layer{k + 1}.weights"] = matmul(da.T, cache.gated[k])
        grads[f"layer{k + 1}.bias"] = da.sum(axis=0)
        dg = matmul(da, layer.weights)
        if net.is_baseline:
            dh = dg
            continue
        gate_sample = cache.samples[k]
        dz = np.sum(dg * cache.hidden[k], axis=0)
        passthrough_grad = d_glm[:, net.head.group_slice(k + 1)]
        d_log_alpha = sample_backward(gate_sample, net.gates[k], dz) + penalty_grads[k]
        if routing_weight:
            _, crossing_rate = expected_l0(net.gates[k])
            routed_change = np.sum(passthrough_grad * cache.hidden[k], axis=0)
            d_log_alpha = d_log_alpha - routing_weight * crossing_rate * routed_change
        grads[f"gate{k + 1}.log_alpha"] = d_log_alpha
        dh = dg * gate_sample.z + passthrough_grad * cache.complements[k]
    return grads


def baseline_forward(net: FeatureLevelNet, batch: np.ndarray) -> np.ndarray:
    """Plain FCNN forward: d(f_K(...f_1(x))) with no gates or passthrough."""
    if not net.is_baseline:
        raise ArgumentError("baseline_forward expects a baseline-mode net")
    return forward_eval(net, batch)
