"""Tests for `reports.levels` and `reports.heatmap`."""

import numpy as np
import pytest

from data.ixor import gen_ixor
from gates.hard_concrete import HardConcreteGate
from network.layers import GLMHead, HiddenLayer
from network.model import FeatureLevelNet
from network.propagation import eval_logits
from network.pruning import prune
from reports.heatmap import export_heatmap, pgm_bytes, select_matrix, to_pixels
from reports.levels import aav_per_level, full_report, gate_stats, level_contributions, routed_features
from utils.errors import ArgumentError, NumericError


@pytest.fixture
def hand_net():
    """2-1-1 regression net: x1 routed to the GLM with weight -0.3, x2 into the layer."""
    return FeatureLevelNet(
        layers=[HiddenLayer(weights=np.array([[2.0, 3.0]]), bias=np.array([-1.0]))],
        gates=[HardConcreteGate(log_alpha=np.array([-10.0, 10.0]))],
        head=GLMHead(
            weights=np.array([[-0.3, 0.5, 1.0]]),
            bias=np.array([0.2]),
            link="identity",
            group_offsets=[0, 2, 3],
        ),
        task="regression",
        feature_names=["income", "age"],
    )


@pytest.mark.unit
class TestLevelStatistics:
    """Routed counts and AAV per level."""

    def test_hand_aav(self, hand_net) -> None:
        assert aav_per_level(hand_net) == [pytest.approx(0.3), pytest.approx(1.0)]

    def test_aav_averages_every_routed_column(self, hand_net) -> None:
        hand_net.gates[0].log_alpha[...] = -10.0
        hand_net.head.weights[...] = [[0.2, -0.4, 1.0]]

        assert aav_per_level(hand_net) == [pytest.approx(0.3), pytest.approx(1.0)]

    def test_no_routed_column_has_no_aav(self, hand_net) -> None:
        hand_net.gates[0].log_alpha[...] = 10.0

        assert aav_per_level(hand_net)[0] is None

    def test_fresh_net_routes_nothing(self, make_net) -> None:
        net = make_net([3, 5, 4, 2], gate_init=2.3)

        assert [s["percent"] for s in gate_stats(net)] == [0.0, 0.0]

    def test_closed_gates_route_everything(self, make_net) -> None:
        net = make_net([3, 5, 4, 2])
        for gate in net.gates:
            gate.log_alpha[...] = -10.0

        stats = gate_stats(net)

        assert [s["percent"] for s in stats] == [100.0, 100.0]
        assert [s["size"] for s in stats] == [3, 5]

    def test_pruned_net_keeps_pre_pruning_sizes(self, hand_net) -> None:
        pruned, _ = prune(hand_net)

        assert gate_stats(pruned) == gate_stats(hand_net)
        assert aav_per_level(pruned) == aav_per_level(hand_net)

    def test_collapsed_levels_survive_pruning(self, make_net) -> None:
        net = make_net([3, 5, 4, 2], seed=1)
        net.gates[0].log_alpha[...] = [10.0, 10.0, -10.0]
        net.gates[1].log_alpha[...] = -10.0
        data = gen_ixor(20, 4)
        pruned, _ = prune(net)

        before = full_report(net, data)
        after = full_report(pruned, data)

        assert [(level.size, level.routed) for level in before.levels] == [(3, 1), (5, 5), (4, 0)]
        assert [(level.size, level.routed) for level in after.levels] == [(3, 1), (5, 5), (4, 0)]
        assert gate_stats(pruned) == gate_stats(net)
        assert aav_per_level(pruned)[:2] == aav_per_level(net)[:2]
        assert aav_per_level(pruned)[2] is None

    def test_routed_inputs_of_a_fully_collapsed_net(self, make_net) -> None:
        net = make_net([3, 5, 2], seed=2)
        net.gates[0].log_alpha[...] = -10.0
        pruned, _ = prune(net)

        assert [f.index for f in routed_features(pruned)] == [0, 1, 2]
        assert routed_features(pruned) == routed_features(net)

    def test_contributions_sum_to_logits(self, small_net, batch) -> None:
        small_net.gates[0].log_alpha[0] = -10.0
        parts = level_contributions(small_net, batch)

        assert parts.shape == (6, 3, 2)
        assert np.allclose(parts.sum(axis=1) + small_net.head.bias, eval_logits(small_net, batch), atol=1e-12)

    def test_routed_features_named(self, hand_net) -> None:
        routed = routed_features(hand_net)

        assert [(f.name, f.index, f.weights) for f in routed] == [("income", 0, [-0.3])]


@pytest.mark.unit
class TestFullReport:
    def test_report_document(self, make_net) -> None:
        net = make_net([3, 5, 4, 2], seed=1)
        net.gates[0].log_alpha[...] = [10.0, 10.0, -10.0]
        net.gates[1].log_alpha[...] = -10.0
        net.feature_names = ["x1", "x2", "x3"]

        report = full_report(net, gen_ixor(40, 2))

        assert report.metric.kind == "accuracy"
        assert report.architecture == "2-5*-2"
        assert report.effective_glm_width == 6
        assert report.mode == "proposed"
        assert [level.routed for level in report.levels] == [1, 5, 0]
        assert sum(level.size for level in report.levels) == net.head.in_dim
        assert report.levels[-1].gated is False
        assert [f.name for f in report.routed_features] == ["x3"]

    def test_baseline_report_has_only_the_final_level(self, make_net) -> None:
        report = full_report(make_net([3, 5, 2], mode="baseline"), gen_ixor(20, 3))

        assert len(report.levels) == 1
        assert report.architecture == "3-5-2"
        assert report.routed_features == []


@pytest.mark.unit
class TestHeatmap:
    """PGM and CSV export."""

    def test_zero_matrix_is_midtone(self) -> None:
        assert np.all(to_pixels(np.zeros((3, 4))) == 128)

    def test_symmetric_scale(self) -> None:
        assert to_pixels(np.array([[-1.0, 0.0], [0.0, 1.0]])).tolist() == [[0, 128], [128, 255]]

    def test_pgm_layout(self) -> None:
        raw = pgm_bytes(np.array([[-2.0, 2.0, 0.0]]))

        assert raw == b"P5\n3 1\n255\n" + bytes([0, 255, 128])

    def test_csv_export(self, tmp_path) -> None:
        path = tmp_path / "w.csv"

        export_heatmap(np.array([[0.1, -2.0], [3.0, 4.0]]), path, "csv")

        assert path.read_text(encoding="utf-8").splitlines() == ["0.10000000000000001,-2", "3,4"]

    def test_non_finite_rejected(self, tmp_path) -> None:
        with pytest.raises(NumericError):
            export_heatmap(np.array([[np.nan]]), tmp_path / "w.pgm")

    def test_select_matrix(self, small_net) -> None:
        assert select_matrix(small_net, "head") is small_net.head.weights
        assert select_matrix(small_net, "2").shape == (4, 5)
        with pytest.raises(ArgumentError):
            select_matrix(small_net, "4")
        with pytest.raises(ArgumentError):
            select_matrix(small_net, "last")
