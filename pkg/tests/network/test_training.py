"""Tests for `network.training`."""

import numpy as np
import pytest

from config.schemas import TrainConfig
from data.dataset import split
from data.ixor import gen_ixor
from network import training
from network.training import baseline_train, default_out_dim, train
from reports.levels import gate_stats
from utils.errors import ArgumentError, NumericError, TrainingDivergedError


@pytest.fixture
def ixor_small():
    return split(gen_ixor(400, 1), seed=1)


def quick_config(**overrides) -> TrainConfig:
    values = dict(iterations=12, eval_every=5, batch_size=32, seed=3, lr=0.01, gate_init=1.0)
    values.update(overrides)
    return TrainConfig(**values)


@pytest.mark.unit
class TestTrain:
    """Seeded minibatch Adam training."""

    def test_same_seed_gives_identical_parameters(self, ixor_small) -> None:
        train_set, _ = ixor_small
        first, _ = train(quick_config(), train_set, [6, 4])
        second, _ = train(quick_config(), train_set, [6, 4])

        for name, value in first.parameters().items():
            assert np.array_equal(value, second.parameters()[name]), name

    def test_different_seed_changes_parameters(self, ixor_small) -> None:
        train_set, _ = ixor_small
        first, _ = train(quick_config(seed=3), train_set, [6, 4])
        second, _ = train(quick_config(seed=4), train_set, [6, 4])

        assert not np.array_equal(first.layers[0].weights, second.layers[0].weights)

    def test_history_records_every_eval_point_and_the_last(self, ixor_small) -> None:
        train_set, test_set = ixor_small
        _, history = train(quick_config(), train_set, [6, 4], eval_set=test_set)

        assert history.iterations == [5, 10, 12]
        assert history.metric_kind == "accuracy"
        assert all(0.0 <= r["metric"] <= 1.0 for r in history.records)
        assert all(len(r["open_gates"]) == 2 for r in history.records)

    def test_lambda_warms_up_linearly(self, ixor_small) -> None:
        train_set, _ = ixor_small
        _, history = train(quick_config(lam=0.2, lambda_warmup_iters=10), train_set, [6, 4])

        lams = [r["lambda"] for r in history.records]
        assert lams == [pytest.approx(0.1), pytest.approx(0.2), pytest.approx(0.2)]

    def test_net_carries_names_and_train_config(self, ixor_small) -> None:
        train_set, _ = ixor_small
        net, _ = train(quick_config(), train_set, [6, 4])

        assert net.feature_names == ["x1", "x2", "x3"]
        assert net.arch == [3, 6, 4, 2]
        assert net.config["train"]["lambda"] == 0.1

    def test_baseline_has_no_gates_and_zero_lambda(self, ixor_small) -> None:
        train_set, _ = ixor_small
        net, history = baseline_train(quick_config(), train_set, [6, 4])

        assert net.is_baseline
        assert net.gates == []
        assert all(r["lambda"] == 0.0 for r in history.records)

    def test_numeric_failure_becomes_divergence(self, ixor_small, monkeypatch) -> None:
        train_set, _ = ixor_small

        def exploding(*args, **kwargs):
            raise NumericError("overflow")

        monkeypatch.setattr(training, "objective", exploding)
        with pytest.raises(TrainingDivergedError) as excinfo:
            train(quick_config(), train_set, [6, 4])
        assert excinfo.value.iteration == 1

    def test_non_finite_objective_becomes_divergence(self, ixor_small, mocker) -> None:
        train_set, _ = ixor_small
        real_objective = training.objective
        calls = {"n": 0}

        def nan_on_third(*args, **kwargs):
            calls["n"] += 1
            value, cache = real_objective(*args, **kwargs)
            return (float("nan") if calls["n"] == 3 else value), cache

        mocker.patch("network.training.objective", side_effect=nan_on_third)
        with pytest.raises(TrainingDivergedError) as excinfo:
            train(quick_config(), train_set, [6, 4])
        assert excinfo.value.iteration == 3

    def test_gate_learning_rate_and_decay_reach_adam(self, ixor_small, mocker) -> None:
        train_set, _ = ixor_small
        real_step = training.adam_step
        rates = []

        def recording(param, grad, state):
            rates.append(state.lr)
            return real_step(param, grad, state)

        mocker.patch("network.training.adam_step", side_effect=recording)
        config = quick_config(lr=0.01, gate_lr=0.05, lr_decay_start=0.5)
        net, _ = train(config, train_set, [6, 4])

        per_iteration = len(net.parameters())
        assert len(rates) == 12 * per_iteration
        assert sorted(set(rates[:per_iteration])) == [0.01, 0.05]
        assert rates[:per_iteration].count(0.05) == 2
        assert sorted(rates[-per_iteration:])[0] == pytest.approx(0.0001)
        assert sorted(rates[-per_iteration:])[-1] == pytest.approx(0.0005)

    def test_routing_weight_reaches_backward(self, ixor_small, mocker) -> None:
        train_set, _ = ixor_small
        spy = mocker.spy(training, "backward")

        train(quick_config(routing_grad_weight=1.5), train_set, [6, 4])

        assert spy.call_count == 12
        assert all(call.kwargs["routing_weight"] == 1.5 for call in spy.call_args_list)

    def test_rejects_empty_architecture(self, ixor_small) -> None:
        with pytest.raises(ArgumentError):
            train(quick_config(), ixor_small[0], [])


@pytest.mark.unit
def test_default_out_dim() -> None:
    data = gen_ixor(50, 0)

    assert default_out_dim(data) == 2


@pytest.mark.unit
def test_zero_lambda_run_routes_nothing(ixor_small) -> None:
    net, _ = train(quick_config(lam=0.0, gate_init=2.3), ixor_small[0], [6, 4])

    assert [s["percent"] for s in gate_stats(net)] == [0.0, 0.0]
