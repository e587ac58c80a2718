"""
Per-level interpretability statistics.

A network's GLM input is split into levels: level k <= K holds the inputs
of hidden layer k that its gate routes straight to the GLM, and level K + 1
is the final hidden output. For each level we report how many features were
routed and the average absolute GLM weight (AAV) on them.

All gate counts come from FeatureLevelNet.gate_values, the same values
prune uses.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from data.dataset import Dataset
from network.model import FeatureLevelNet, PrunedNet
from network.propagation import eval_glm_input, forward_eval
from network.pruning import effective_glm_width, prune
from numerics.linalg import matmul
from reports.metrics import default_metric, metric
from reports.schemas import LevelReport, LevelStats, MetricValue, RoutedFeature

logger = logging.getLogger(__name__)

AnyNet = Union[FeatureLevelNet, PrunedNet]


@dataclass
class _Level:
    size: int
    routed: int
    columns: Optional[np.ndarray]


def _levels(net: AnyNet) -> List[_Level]:
    """
    Size, routed count and routed head columns of levels 1..K, then the final level.

    A pruned net reports the sizes and routed counts of the net it came from.
    The first level that collapsed keeps its head columns (they form the
    starred group); levels folded into the head bias have none.
    """
    head = net.head
    final = head.weights[:, head.group_slice(head.n_groups)]
    if isinstance(net, FeatureLevelNet):
        levels = []
        for k, z in enumerate(net.gate_values(), start=1):
            routed = z == 0.0
            columns = head.weights[:, head.group_slice(k)][:, routed]
            levels.append(_Level(int(z.shape[0]), int(np.count_nonzero(routed)), columns))
        levels.append(_Level(int(final.shape[1]), 0, final))
        return levels

    depth = net.depth
    gated = len(net.source_arch) - 2
    levels = []
    for k in range(1, gated + 1):
        if k <= depth:
            columns = head.weights[:, head.group_slice(k)]
        elif k == depth + 1:
            columns = final
        else:
            columns = None
        levels.append(_Level(net.source_arch[k - 1], net.level_routed[k - 1], columns))
    levels.append(_Level(net.source_arch[-2], 0, final if depth == gated else None))
    return levels


def gate_stats(net: AnyNet) -> List[Dict[str, float]]:
    """
    Routed vs passed-on counts for every gated level.

    Returns:
        One dict per level with level, size, routed, open and percent
    """
    return [
        _level_counts(k, level.size, level.routed)
        for k, level in enumerate(_levels(net)[:-1], start=1)
    ]


def _level_counts(level: int, size: int, routed: int) -> Dict[str, float]:
    return {
        "level": level,
        "size": size,
        "routed": routed,
        "open": size - routed,
        "percent": 100.0 * routed / size if size else 0.0,
    }


def _aav(columns: Optional[np.ndarray]) -> Optional[float]:
    if columns is None or columns.size == 0:
        return None
    return float(np.mean(np.abs(columns)))


def aav_per_level(net: AnyNet) -> List[Optional[float]]:
    """
    Average |GLM weight| per level.

    Levels 1..K average over routed columns only (None when nothing is
    routed); the final level averages over the whole last hidden group.
    Multi-output heads average over every output row. Levels a pruned net
    folded into its head bias have no weights left and report None.
    """
    return [_aav(level.columns) for level in _levels(net)]


def level_contributions(net: AnyNet, batch: np.ndarray) -> np.ndarray:
    """
    Each level's linear share of the pre-link output.

    Returns:
        (N, levels, out) array; summing over levels and adding the head bias
        gives the logits of forward_eval
    """
    glm_input = eval_glm_input(net, batch)
    head = net.head
    parts = [
        matmul(glm_input[:, head.group_slice(k)], head.weights[:, head.group_slice(k)].T)
        for k in range(1, head.n_groups + 1)
    ]
    return np.stack(parts, axis=1)


def routed_features(net: AnyNet) -> List[RoutedFeature]:
    """Level-1 input features that go straight to the GLM, with their weights."""
    names = net.feature_names or [f"x{j + 1}" for j in range(net.input_dim)]
    head = net.head
    if isinstance(net, PrunedNet):
        if net.levels:
            index = net.levels[0].passthrough_index
            weights = head.weights[:, head.group_slice(1)]
        else:
            index = np.arange(net.input_dim)
            weights = head.weights[:, head.group_slice(head.n_groups)]
    elif net.is_baseline:
        return []
    else:
        index = np.flatnonzero(net.gate_values()[0] == 0.0)
        weights = head.weights[:, head.group_slice(1)][:, index]
    return [
        RoutedFeature(name=names[j], index=int(j), weights=[float(w) for w in weights[:, i]])
        for i, j in enumerate(index)
    ]


def _architecture(net: AnyNet) -> Tuple[str, int]:
    if isinstance(net, PrunedNet):
        return net.architecture, effective_glm_width(net)
    if net.is_baseline:
        return "-".join(str(w) for w in net.arch), net.head.in_dim
    pruned, architecture = prune(net)
    return architecture, effective_glm_width(pruned)


def _mode(net: AnyNet) -> str:
    return "pruned" if isinstance(net, PrunedNet) else net.mode


def full_report(net: AnyNet, test_set: Dataset, metric_kind: Optional[str] = None) -> LevelReport:
    """
    Metric, gate statistics, AAVs and architecture in one document.

    Args:
        net: trained, baseline or pruned network
        test_set: rows to evaluate on
        metric_kind: defaults to rmse for regression, accuracy otherwise
    """
    kind = metric_kind or default_metric(net.task)
    value = metric(kind, forward_eval(net, test_set.features), test_set.targets())
    architecture, width = _architecture(net)

    aavs = aav_per_level(net)
    levels = [
        LevelStats(level=s["level"], size=s["size"], routed=s["routed"], percent=s["percent"], aav=aavs[i])
        for i, s in enumerate(gate_stats(net))
    ]
    final = _levels(net)[-1]
    levels.append(
        LevelStats(level=len(levels) + 1, size=final.size, routed=0, percent=0.0, aav=aavs[-1], gated=False)
    )

    report = LevelReport(
        metric=MetricValue(kind=kind, value=value),
        architecture=architecture,
        effective_glm_width=width,
        mode=_mode(net),
        levels=levels,
        routed_features=routed_features(net),
        normalization=test_set.stats.fitted_on if test_set.stats is not None else None,
        config=net.config,
    )
    logger.info(f"Report: {kind} {value:.4f}, architecture {architecture}")
    return report
