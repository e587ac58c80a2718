"""
Minibatch training with Adam.

A run is fully determined by (config, dataset, architecture): the seed is
split into independent streams for initialization, shuffling and gate
noise, and the default matmul backend has a fixed summation order.
"""

import logging
import time
from typing import Optional, Sequence, Tuple

import numpy as np

from config.schemas import TrainConfig
from data.dataset import Dataset
from monitoring.history import TrainHistory
from network.model import FeatureLevelNet, Mode, init_net
from network.propagation import backward, forward_eval, objective
from numerics.linalg import use_backend
from numerics.optim import AdamState, adam_step
from numerics.rng import Rng
from reports.metrics import default_metric, metric
from utils.errors import ArgumentError, NumericError, TrainingDivergedError

logger = logging.getLogger(__name__)

# Rng.derive stream ids
INIT_STREAM = 0
SHUFFLE_STREAM = 1
NOISE_STREAM = 2


def default_out_dim(dataset: Dataset) -> int:
    """1 for regression, otherwise the number of classes (at least 2)."""
    if dataset.task == "regression":
        return 1
    return max(2, int(np.max(dataset.labels)) + 1)


def _base_lr(name: str, config: TrainConfig) -> float:
    """Gate log_alpha parameters use gate_lr when it is set."""
    if name.endswith(".log_alpha") and config.gate_lr is not None:
        return config.gate_lr
    return config.lr


class _BatchStream:
    """Epoch-wise shuffled minibatch indices; a trailing partial batch is dropped."""

    def __init__(self, n: int, batch_size: int, rng: Rng):
        self.n = n
        self.batch_size = min(batch_size, n)
        self.rng = rng
        self.order = rng.permutation(n)
        self.pos = 0
        self.epoch = 1

    def next(self) -> np.ndarray:
        if self.pos + self.batch_size > self.n:
            self.order = self.rng.permutation(self.n)
            self.pos = 0
            self.epoch += 1
        index = self.order[self.pos:self.pos + self.batch_size]
        self.pos += self.batch_size
        return index


def train(
    config: TrainConfig,
    dataset: Dataset,
    hidden: Sequence[int],
    task: Optional[str] = None,
    out_dim: Optional[int] = None,
    eval_set: Optional[Dataset] = None,
    metric_kind: Optional[str] = None,
    mode: Mode = "proposed",
) -> Tuple[FeatureLevelNet, TrainHistory]:
    """
    Train a network from scratch.

    Args:
        config: optimization settings
        dataset: training rows
        hidden: hidden layer widths
        task: defaults to the dataset's task
        out_dim: GLM output width (default from the labels)
        eval_set: held-out rows evaluated at every eval point
        metric_kind: held-out metric (default rmse or accuracy by task)
        mode: "proposed" (gated) or "baseline" (plain FCNN)

    Returns:
        (trained net, history)

    Raises:
        TrainingDivergedError: if the objective turns non-finite
    """
    if not hidden:
        raise ArgumentError("architecture needs at least one hidden layer")
    if len(dataset) == 0:
        raise ArgumentError("cannot train on an empty dataset")
    task = task or dataset.task
    out_dim = out_dim or default_out_dim(dataset)
    metric_kind = metric_kind or default_metric(task)

    root = Rng(config.seed)
    net = init_net(
        dataset.n_features,
        hidden,
        out_dim,
        task,
        root.derive(INIT_STREAM),
        mode=mode,
        gate_init=config.gate_init,
        gate_init_std=config.gate_init_std,
        gate_constants=config.gate_constants,
        feature_names=list(dataset.feature_names),
    )
    net.config = {"train": config.model_dump(mode="json", by_alias=True)}
    params = net.parameters()
    base_lr = {name: _base_lr(name, config) for name in params}
    states = {
        name: AdamState.for_param(p, base_lr[name], config.beta1, config.beta2, config.epsilon)
        for name, p in params.items()
    }
    batches = _BatchStream(len(dataset), config.batch_size, root.derive(SHUFFLE_STREAM))
    noise_rng = root.derive(NOISE_STREAM)
    targets_all = dataset.targets()
    history = TrainHistory(metric_kind=metric_kind if eval_set is not None else None)

    logger.info(
        f"Training {mode} net {'-'.join(str(w) for w in net.arch)} for {config.iterations} iterations "
        f"(batch {batches.batch_size}, lambda {config.lam}, warm-up {config.warmup_iters}, matmul {config.matmul}, "
        f"lr {config.lr}, gate lr {config.lr if config.gate_lr is None else config.gate_lr}, decay from {config.lr_decay_start}, "
        f"routing weight {config.routing_grad_weight})"
    )
    started = time.perf_counter()
    with use_backend(config.matmul):
        for iteration in range(1, config.iterations + 1):
            index = batches.next()
            x, t = dataset.features[index], targets_all[index]
            lam = 0.0 if net.is_baseline else config.lambda_at(iteration)
            try:
                value, cache = objective(net, x, t, rng=noise_rng, lam=lam)
            except NumericError:
                raise TrainingDivergedError(iteration, float("nan")) from None
            if not np.isfinite(value):
                raise TrainingDivergedError(iteration, value)

            grads = backward(net, cache, t, routing_weight=config.routing_grad_weight)
            scale = config.lr_scale_at(iteration)
            for name, param in params.items():
                states[name].lr = base_lr[name] * scale
                adam_step(param, grads[name], states[name])

            if iteration % config.eval_every == 0 or iteration == config.iterations:
                held_out = None
                if eval_set is not None:
                    held_out = metric(metric_kind, forward_eval(net, eval_set.features), eval_set.targets())
                record = history.track(
                    iteration=iteration,
                    objective=value,
                    data_loss=cache.data_loss,
                    lam=lam,
                    open_gates=net.open_gate_counts(),
                    metric=held_out,
                )
                shown = "" if held_out is None else f", {metric_kind} {held_out:.4f}"
                logger.info(
                    f"iter {iteration} (epoch {batches.epoch}): objective {value:.6f}, "
                    f"loss {cache.data_loss:.6f}, lambda {lam:.4g}{shown}, open gates {record['open_gates']}"
                )

    history.track_duration(time.perf_counter() - started)
    history.log_summary()
    return net, history


def baseline_train(
    config: TrainConfig,
    dataset: Dataset,
    hidden: Sequence[int],
    task: Optional[str] = None,
    out_dim: Optional[int] = None,
    eval_set: Optional[Dataset] = None,
    metric_kind: Optional[str] = None,
) -> Tuple[FeatureLevelNet, TrainHistory]:
    """Train the plain FCNN with the same numerics, streams and schedule."""
    return train(config, dataset, hidden, task, out_dim, eval_set, metric_kind, mode="baseline")
