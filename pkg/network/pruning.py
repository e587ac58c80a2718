"""
Compile a trained proposed net into its pruned form.

At deterministic gate values every input column of layer k is either routed
to the GLM (gate exactly 0) or scaled into layer k (gate > 0), never both.
Pruning keeps only the live path of each column:

- routed columns stay in the head, the slots of scaled columns are dropped
- scaled columns stay in layer k with their gate value folded into the weights
- a layer with no scaled inputs sees a constant, so it and every deeper
  layer collapse into the head bias; its input becomes the final (starred) group

The pruned net computes the same function as forward_eval on the original.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from gates.hard_concrete import binary_complement
from network.layers import GLMHead, HiddenLayer
from network.model import FeatureLevelNet, PrunedLevel, PrunedNet
from numerics.linalg import matmul, relu
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)


def architecture_string(surviving_inputs: Sequence[int], star_width: int, out_dim: int) -> str:
    """e.g. ([10, 28], 32, 1) -> "10-28-32*-1"."""
    parts = [str(n) for n in surviving_inputs] + [f"{star_width}*", str(out_dim)]
    return "-".join(parts)


def effective_glm_width(pruned: PrunedNet) -> int:
    """Starred width plus every surviving passthrough count."""
    return pruned.head.in_dim


def _collapsed_contribution(net: FeatureLevelNet, zs: List[np.ndarray], start: int) -> np.ndarray:
    """
    Constant head contribution of layer `start` onwards when that layer has no inputs.

    Layer `start` (0-based) sees an all-zero input, so its output is relu(bias);
    everything downstream of it is constant too.
    """
    head = net.head
    h = relu(net.layers[start].bias).reshape(1, -1)
    total = np.zeros(head.out_dim)
    for k in range(start + 1, net.depth):
        z = zs[k]
        passthrough = h * binary_complement(z)
        total += matmul(passthrough, head.weights[:, head.group_slice(k + 1)].T)[0]
        h = relu(net.layers[k].pre_activation(h * z))
    total += matmul(h, head.weights[:, head.group_slice(net.depth + 1)].T)[0]
    return total


def prune(net: FeatureLevelNet) -> Tuple[PrunedNet, str]:
    """
    Remove every gated-off path from a trained proposed net.

    Returns:
        (pruned net, architecture string such as "10-28-32*-1")
    """
    if net.is_baseline:
        raise ArgumentError("baseline nets have no gates to prune")

    zs = net.gate_values()
    head = net.head
    levels: List[PrunedLevel] = []
    head_columns: List[np.ndarray] = []
    bias = head.bias.copy()
    surviving_inputs: List[int] = []
    final_columns = head.weights[:, head.group_slice(net.depth + 1)]
    star_width = net.layers[-1].out_dim

    for k, (layer, z) in enumerate(zip(net.layers, zs)):
        keep = np.flatnonzero(z > 0.0)
        routed = np.flatnonzero(z == 0.0)
        group = head.weights[:, head.group_slice(k + 1)]
        if keep.size == 0:
            bias = bias + _collapsed_contribution(net, zs, k)
            final_columns = group
            star_width = layer.in_dim
            logger.info(
                f"Layer {k + 1} receives no inputs; removing layers {k + 1}..{net.depth}"
            )
            break
        levels.append(
            PrunedLevel(
                passthrough_index=routed,
                hidden_index=keep,
                layer=HiddenLayer(weights=layer.weights[:, keep] * z[keep], bias=layer.bias.copy()),
            )
        )
        head_columns.append(group[:, routed])
        surviving_inputs.append(int(keep.size))

    weights = np.concatenate(head_columns + [final_columns], axis=1)
    offsets = [0]
    for cols in head_columns:
        offsets.append(offsets[-1] + cols.shape[1])
    offsets.append(offsets[-1] + final_columns.shape[1])

    architecture = architecture_string(surviving_inputs, star_width, head.out_dim)
    pruned = PrunedNet(
        levels=levels,
        head=GLMHead(weights=weights, bias=bias, link=head.link, group_offsets=offsets),
        task=net.task,
        input_dim=net.input_dim,
        architecture=architecture,
        source_arch=net.arch,
        level_routed=[int(np.count_nonzero(z == 0.0)) for z in zs],
        feature_names=net.feature_names,
        config=net.config,
    )
    logger.info(
        f"Pruned {'-'.join(str(w) for w in net.arch)} to {architecture} "
        f"(effective GLM width {effective_glm_width(pruned)})"
    )
    return pruned, architecture
