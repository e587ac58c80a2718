"""
The feature-leveling network container and its initialization.

A proposed net has K hidden layers, K gates (gate k sits in front of layer k)
and a GLM head over K passthrough groups plus the last hidden output. A
baseline net is the plain FCNN: no gates and a head over the last hidden
output only.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Sequence

import numpy as np

from config import settings
from config.schemas import GateConstants
from gates.hard_concrete import HardConcreteGate, deterministic
from network.layers import GLMHead, HiddenLayer, link_for
from numerics.rng import Rng
from utils.errors import ArgumentError, ShapeError

logger = logging.getLogger(__name__)

Mode = Literal["proposed", "baseline"]


@dataclass
class FeatureLevelNet:
    """
    Parameters of one network.

    Fields:
        layers: K hidden ReLU layers
        gates: K gates for a proposed net, empty for a baseline net
        head: GLM decision layer
        task: "regression", "binary" or "multiclass"
        mode: "proposed" or "baseline"
        feature_names: names of the input columns, if known
        config: effective run config the net was trained with, if any
    """
    layers: List[HiddenLayer]
    gates: List[HardConcreteGate]
    head: GLMHead
    task: str
    mode: Mode = "proposed"
    feature_names: Optional[List[str]] = None
    config: Optional[Dict[str, Any]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.validate()

    @property
    def depth(self) -> int:
        """Number of hidden layers K."""
        return len(self.layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def is_baseline(self) -> bool:
        return self.mode == "baseline"

    @property
    def arch(self) -> List[int]:
        """[input, hidden_1, ..., hidden_K, output]."""
        return [self.input_dim] + [layer.out_dim for layer in self.layers] + [self.head.out_dim]

    @property
    def gate_constants(self) -> GateConstants:
        if self.gates:
            g = self.gates[0]
            return GateConstants(beta=g.beta, gamma=g.gamma, zeta=g.zeta)
        return GateConstants()

    def validate(self) -> None:
        """
        Check that every dimension lines up.

        Raises:
            ShapeError: naming the first inconsistent layer
        """
        if not self.layers:
            raise ShapeError("a network needs at least one hidden layer")
        for k in range(1, self.depth):
            if self.layers[k].in_dim != self.layers[k - 1].out_dim:
                raise ShapeError(
                    f"layer {k + 1}: input width {self.layers[k].in_dim} != "
                    f"layer {k} output width {self.layers[k - 1].out_dim}"
                )

        if self.is_baseline:
            if self.gates:
                raise ShapeError("baseline net must not carry gates")
            expected = [0, self.layers[-1].out_dim]
        else:
            if len(self.gates) != self.depth:
                raise ShapeError(f"{len(self.gates)} gates for {self.depth} hidden layers")
            for k, (gate, layer) in enumerate(zip(self.gates, self.layers), start=1):
                if gate.dim != layer.in_dim:
                    raise ShapeError(
                        f"layer {k}: gate dimension {gate.dim} != layer input width {layer.in_dim}"
                    )
            expected = [0]
            for layer in self.layers:
                expected.append(expected[-1] + layer.in_dim)
            expected.append(expected[-1] + self.layers[-1].out_dim)

        if self.head.group_offsets != expected:
            raise ShapeError(f"head: group offsets {self.head.group_offsets} != expected {expected}")
        if self.head.link != link_for(self.task, self.head.out_dim):
            raise ShapeError(f"head: link '{self.head.link}' does not fit task '{self.task}'")

    def gate_values(self) -> List[np.ndarray]:
        """Deterministic gate values per level; empty for a baseline net."""
        return [deterministic(gate) for gate in self.gates]

    def open_gate_counts(self) -> List[int]:
        """Per layer, how many inputs pass on to the hidden layer (gate > 0)."""
        return [int(np.count_nonzero(z > 0.0)) for z in self.gate_values()]

    def parameters(self) -> Dict[str, np.ndarray]:
        """Every trainable array by name. The arrays are live references."""
        params: Dict[str, np.ndarray] = {}
        for k, layer in enumerate(self.layers, start=1):
            params[f"layer{k}.weights"] = layer.weights
            params[f"layer{k}.bias"] = layer.bias
        for k, gate in enumerate(self.gates, start=1):
            params[f"gate{k}.log_alpha"] = gate.log_alpha
        params["head.weights"] = self.head.weights
        params["head.bias"] = self.head.bias
        return params


def head_offsets(input_dim: int, hidden: Sequence[int], mode: Mode) -> List[int]:
    """Group boundaries of the GLM input for a given architecture."""
    if mode == "baseline":
        return [0, hidden[-1]]
    widths = [input_dim] + list(hidden[:-1]) + [hidden[-1]]
    offsets = [0]
    for width in widths:
        offsets.append(offsets[-1] + width)
    return offsets


def init_net(
    input_dim: int,
    hidden: Sequence[int],
    out_dim: int,
    task: str,
    rng: Rng,
    mode: Mode = "proposed",
    gate_init: float = settings.DEFAULT_GATE_INIT,
    gate_init_std: float = settings.DEFAULT_GATE_INIT_STD,
    gate_constants: Optional[GateConstants] = None,
    feature_names: Optional[List[str]] = None,
) -> FeatureLevelNet:
    """
    Build a freshly initialized network.

    He-normal hidden weights, zero biases, an all-zero GLM head and gates
    with log_alpha ~ N(gate_init, gate_init_std).

    Args:
        input_dim: number of input features
        hidden: hidden layer widths, at least one
        out_dim: GLM output width
        task: "regression", "binary" or "multiclass"
        rng: source of initialization randomness
        mode: "proposed" (gated) or "baseline" (plain FCNN)
    """
    if not hidden:
        raise ArgumentError("architecture needs at least one hidden layer")
    constants = gate_constants or GateConstants()

    layers: List[HiddenLayer] = []
    in_dim = input_dim
    for width in hidden:
        std = np.sqrt(2.0 / in_dim)
        weights = rng.normal(width * in_dim, 0.0, std).reshape(width, in_dim)
        layers.append(HiddenLayer(weights=weights, bias=np.zeros(width)))
        in_dim = width

    gates: List[HardConcreteGate] = []
    if mode == "proposed":
        for layer in layers:
            gates.append(
                HardConcreteGate(
                    log_alpha=rng.normal(layer.in_dim, gate_init, gate_init_std),
                    beta=constants.beta,
                    gamma=constants.gamma,
                    zeta=constants.zeta,
                )
            )

    offsets = head_offsets(input_dim, hidden, mode)
    head = GLMHead(
        weights=np.zeros((out_dim, offsets[-1])),
        bias=np.zeros(out_dim),
        link=link_for(task, out_dim),
        group_offsets=offsets,
    )
    arch = "-".join(str(w) for w in [input_dim, *hidden, out_dim])
    logger.info(f"Initialized {mode} net {arch} for {task} task")
    return FeatureLevelNet(
        layers=layers,
        gates=gates,
        head=head,
        task=task,
        mode=mode,
        feature_names=feature_names,
    )


@dataclass
class PrunedLevel:
    """
    One surviving hidden layer of a pruned net.

    Fields:
        passthrough_index: columns of the previous hidden output routed to the GLM
        hidden_index: columns fed to the layer (gate values already folded in)
        layer: the layer, restricted to hidden_index
    """
    passthrough_index: np.ndarray
    hidden_index: np.ndarray
    layer: HiddenLayer

    def __post_init__(self) -> None:
        self.passthrough_index = np.asarray(self.passthrough_index, dtype=np.int64).reshape(-1)
        self.hidden_index = np.asarray(self.hidden_index, dtype=np.int64).reshape(-1)
        if self.layer.in_dim != self.hidden_index.shape[0]:
            raise ShapeError(
                f"pruned layer input width {self.layer.in_dim} != {self.hidden_index.shape[0]} kept columns"
            )


@dataclass
class PrunedNet:
    """
    A proposed net with its gates compiled away.

    The GLM input is the passthrough columns of every surviving level followed
    by the last surviving hidden output (the raw input when no layer survives).
    source_arch and level_routed keep the shape of the net before pruning:
    level_routed holds the routed count of every gated level, including the
    levels that collapsed into the head bias.
    """
    levels: List[PrunedLevel]
    head: GLMHead
    task: str
    input_dim: int
    architecture: str
    source_arch: List[int]
    level_routed: List[int]
    feature_names: Optional[List[str]] = None
    config: Optional[Dict[str, Any]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.level_routed = [int(n) for n in self.level_routed]
        if len(self.level_routed) != len(self.source_arch) - 2:
            raise ShapeError(
                f"pruned net: {len(self.level_routed)} routed counts for {len(self.source_arch) - 2} gated levels"
            )
        for k, level in enumerate(self.levels, start=1):
            if level.passthrough_index.shape[0] != self.level_routed[k - 1]:
                raise ShapeError(f"pruned level {k}: routed count {self.level_routed[k - 1]} != passthrough columns")
        width = self.input_dim
        expected = [0]
        for k, level in enumerate(self.levels, start=1):
            covered = np.concatenate([level.passthrough_index, level.hidden_index])
            if covered.size and (covered.min() < 0 or covered.max() >= width):
                raise ShapeError(f"pruned level {k}: column index outside width {width}")
            expected.append(expected[-1] + level.passthrough_index.shape[0])
            width = level.layer.out_dim
        expected.append(expected[-1] + width)
        if self.head.group_offsets != expected:
            raise ShapeError(f"pruned head: group offsets {self.head.group_offsets} != expected {expected}")

    @property
    def depth(self) -> int:
        return len(self.levels)
