"""
Versioned JSON checkpoints.

Every float is stored as a hex-float string (float.hex), so a load of a
saved net reproduces each parameter bit for bit. Two kinds exist:

    "network": a proposed or baseline FeatureLevelNet
    "pruned":  a PrunedNet written by the prune command

The effective run config and the input feature names travel with the
parameters.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from config import settings
from gates.hard_concrete import HardConcreteGate
from network.layers import GLMHead, HiddenLayer
from network.model import FeatureLevelNet, PrunedLevel, PrunedNet
from storage.files import PathLike, atomic_write_text
from utils.errors import (
    ArgumentError,
    CheckpointNotFoundError,
    CheckpointParseError,
    CheckpointValidationError,
    SchemaVersionError,
    ShapeError,
)

logger = logging.getLogger(__name__)

HexVector = List[str]
HexMatrix = List[List[str]]
AnyNet = Union[FeatureLevelNet, PrunedNet]


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GateConstantsRecord(_Record):
    beta: str
    gamma: str
    zeta: str


class LayerRecord(_Record):
    weights: HexMatrix
    bias: HexVector


class GateRecord(_Record):
    log_alpha: HexVector


class HeadRecord(_Record):
    weights: HexMatrix
    bias: HexVector
    link: Literal["identity", "sigmoid", "softmax"]
    group_offsets: List[int]


class PrunedLevelRecord(_Record):
    passthrough_index: List[int]
    hidden_index: List[int]
    weights: HexMatrix
    bias: HexVector


class NetworkCheckpoint(_Record):
    version: int
    kind: Literal["network"] = "network"
    mode: Literal["proposed", "baseline"]
    task: Literal["regression", "binary", "multiclass"]
    arch: List[int]
    gate_constants: GateConstantsRecord
    feature_names: Optional[List[str]] = None
    config: Optional[Dict[str, Any]] = None
    layers: List[LayerRecord]
    gates: List[GateRecord]
    head: HeadRecord


class PrunedCheckpoint(_Record):
    version: int
    kind: Literal["pruned"]
    task: Literal["regression", "binary", "multiclass"]
    architecture: str
    source_arch: List[int]
    level_routed: List[int]
    input_dim: int
    feature_names: Optional[List[str]] = None
    config: Optional[Dict[str, Any]] = None
    levels: List[PrunedLevelRecord]
    head: HeadRecord


def _hex_vector(values: np.ndarray) -> HexVector:
    return [float(v).hex() for v in np.asarray(values).reshape(-1)]


def _hex_matrix(values: np.ndarray) -> HexMatrix:
    return [_hex_vector(row) for row in np.asarray(values)]


def _from_hex(values: Union[HexVector, HexMatrix], where: str) -> np.ndarray:
    try:
        if values and isinstance(values[0], list):
            array = np.array([[float.fromhex(v) for v in row] for row in values], dtype=np.float64)
        else:
            array = np.array([float.fromhex(v) for v in values], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise CheckpointParseError(f"{where}: invalid hex-float value ({e})") from e
    if not np.all(np.isfinite(array)):
        raise CheckpointParseError(f"{where}: non-finite value")
    return array


def _matrix(values: HexMatrix, rows: int, where: str) -> np.ndarray:
    m = _from_hex(values, where)
    if m.ndim != 2:
        if m.size == 0:
            return np.zeros((rows, 0))
        raise CheckpointValidationError(f"{where}: weights must be a matrix")
    return m


def _head_record(head: GLMHead) -> Dict[str, Any]:
    return {
        "weights": _hex_matrix(head.weights),
        "bias": _hex_vector(head.bias),
        "link": head.link,
        "group_offsets": list(head.group_offsets),
    }


def _build_head(record: HeadRecord) -> GLMHead:
    return GLMHead(
        weights=_matrix(record.weights, len(record.bias), "head"),
        bias=_from_hex(record.bias, "head"),
        link=record.link,
        group_offsets=record.group_offsets,
    )


def to_dict(net: AnyNet) -> Dict[str, Any]:
    """JSON-ready checkpoint document."""
    if isinstance(net, PrunedNet):
        return {
            "version": settings.CHECKPOINT_VERSION,
            "kind": "pruned",
            "task": net.task,
            "architecture": net.architecture,
            "source_arch": list(net.source_arch),
            "level_routed": list(net.level_routed),
            "input_dim": net.input_dim,
            "feature_names": net.feature_names,
            "config": net.config,
            "levels": [
                {
                    "passthrough_index": [int(i) for i in level.passthrough_index],
                    "hidden_index": [int(i) for i in level.hidden_index],
                    "weights": _hex_matrix(level.layer.weights),
                    "bias": _hex_vector(level.layer.bias),
                }
                for level in net.levels
            ],
            "head": _head_record(net.head),
        }

    constants = net.gate_constants
    return {
        "version": settings.CHECKPOINT_VERSION,
        "kind": "network",
        "mode": net.mode,
        "task": net.task,
        "arch": net.arch,
        "gate_constants": {
            "beta": float(constants.beta).hex(),
            "gamma": float(constants.gamma).hex(),
            "zeta": float(constants.zeta).hex(),
        },
        "feature_names": net.feature_names,
        "config": net.config,
        "layers": [
            {"weights": _hex_matrix(layer.weights), "bias": _hex_vector(layer.bias)}
            for layer in net.layers
        ],
        "gates": [{"log_alpha": _hex_vector(gate.log_alpha)} for gate in net.gates],
        "head": _head_record(net.head),
    }


def _build_network(record: NetworkCheckpoint) -> FeatureLevelNet:
    layers = [
        HiddenLayer(
            weights=_matrix(layer.weights, len(layer.bias), f"layer {k}"),
            bias=_from_hex(layer.bias, f"layer {k}"),
        )
        for k, layer in enumerate(record.layers, start=1)
    ]
    c = record.gate_constants
    beta, gamma, zeta = (float(v) for v in _from_hex([c.beta, c.gamma, c.zeta], "gate_constants"))
    gates = [
        HardConcreteGate(log_alpha=_from_hex(g.log_alpha, f"gate {k}"), beta=beta, gamma=gamma, zeta=zeta)
        for k, g in enumerate(record.gates, start=1)
    ]
    net = FeatureLevelNet(
        layers=layers,
        gates=gates,
        head=_build_head(record.head),
        task=record.task,
        mode=record.mode,
        feature_names=record.feature_names,
        config=record.config,
    )
    if net.arch != record.arch:
        raise CheckpointValidationError(f"stored arch {record.arch} != parameter shapes {net.arch}")
    return net


def _build_pruned(record: PrunedCheckpoint) -> PrunedNet:
    levels = [
        PrunedLevel(
            passthrough_index=np.asarray(level.passthrough_index, dtype=np.int64),
            hidden_index=np.asarray(level.hidden_index, dtype=np.int64),
            layer=HiddenLayer(
                weights=_matrix(level.weights, len(level.bias), f"pruned level {k}"),
                bias=_from_hex(level.bias, f"pruned level {k}"),
            ),
        )
        for k, level in enumerate(record.levels, start=1)
    ]
    return PrunedNet(
        levels=levels,
        head=_build_head(record.head),
        task=record.task,
        input_dim=record.input_dim,
        architecture=record.architecture,
        source_arch=record.source_arch,
        level_routed=record.level_routed,
        feature_names=record.feature_names,
        config=record.config,
    )


def from_dict(data: Any, source: str = "<checkpoint>") -> AnyNet:
    """
    Rebuild a net from a checkpoint document.

    Raises:
        SchemaVersionError: version is not the supported one
        CheckpointParseError: keys missing or mistyped
        CheckpointValidationError: dimensions inconsistent (names the layer)
    """
    if not isinstance(data, dict):
        raise CheckpointParseError(f"{source}: checkpoint must be a JSON object")
    version = data.get("version")
    if version != settings.CHECKPOINT_VERSION:
        raise SchemaVersionError(
            f"{source}: checkpoint version {version!r}, expected {settings.CHECKPOINT_VERSION}"
        )
    try:
        if data.get("kind", "network") == "pruned":
            return _build_pruned(PrunedCheckpoint.model_validate(data))
        return _build_network(NetworkCheckpoint.model_validate(data))
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise CheckpointParseError(f"{source}: {location}: {first['msg']}") from e
    except (ShapeError, ArgumentError) as e:
        raise CheckpointValidationError(f"{source}: {e}") from e


def save(net: AnyNet, path: PathLike) -> Path:
    """Write `net` as a checkpoint atomically."""
    text = json.dumps(to_dict(net), indent=1)
    target = atomic_write_text(path, text + "\n")
    logger.info(f"Saved checkpoint to {target}")
    return target


def load(path: PathLike) -> AnyNet:
    """
    Read a checkpoint written by `save`.

    Raises:
        CheckpointNotFoundError: path does not exist
        CheckpointParseError: truncated or malformed file
        SchemaVersionError, CheckpointValidationError: see from_dict
    """
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except FileNotFoundError:
        raise CheckpointNotFoundError(str(path)) from None
    try:
        data = json.loads(raw.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CheckpointParseError(f"{path}: not valid JSON ({e})") from e
    net = from_dict(data, str(path))
    logger.info(f"Loaded checkpoint {path}")
    return net
