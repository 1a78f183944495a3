"""Testes da seleção, compactação, fusão, contagens e varredura."""

from __future__ import annotations


import csv
import json
from pathlib import Path

import numpy as np
import pytest
from conftest import MICRO_WIDTHS

from slim.data import Dataset
from slim.errors import DeadLayerError, SelectionError
from slim.model import GateKind
from slim.network import NetworkGraph, build_bn_testnet, build_lenet5_caffe
from slim.network.impl import Conv2d
from slim.pruning import (
    DEAD_LAYER_NOTE,
    SWEEP_HEADER,
    ChannelSelection,
    PruneReport,
    Selection,
    compact,
    count_flops,
    count_params,
    merge_gates,
    prune,
    pruning_rate_at,
    select_channels,
    threshold_sweep,
    write_sweep_csv,
)

SMALL_SHAPE = (1, 8, 8)


def _keep_only(net: NetworkGraph, gate: str, kept: range) -> None:
    g = net.layer(gate).g.data
    mask = np.zeros(g.size, dtype=bool)
    mask[list(kept)] = True
    g[~mask] = 0.0


@pytest.fixture
def sparse_lenet() -> NetworkGraph:
    """LeNet completa com a assinatura 9-17-43-25 e portas variadas."""
    net = build_lenet5_caffe(seed=11)
    rng = np.random.default_rng(3)
    for gate in ("gate1", "gate2", "gate3", "gate4"):
        g = net.layer(gate).g.data
        g[:] = rng.uniform(0.3, 2.0, g.size)

    _keep_only(net, "gate1", range(0, 18, 2))
    _keep_only(net, "gate2", range(17))
    _keep_only(net, "gate3", range(5, 48))
    _keep_only(net, "gate4", range(100, 125))
    return net


class TestSelection:
    """Limiar estrito sobre os valores de porta."""

    def test_exponential_keeps_positive_factors(self) -> None:
        net = build_lenet5_caffe(widths=(3, 8, 16))
        net.layer("gate1").g.data[:] = [0.0, 1.0, 0.5]
        selection = select_channels(net, 0.0)
        assert selection.groups["conv1"].kept.tolist() == [1, 2]
        assert selection.groups["conv1"].removed.tolist() == [0]

    def test_tiny_exponential_gate_is_pruned_at_zero(
        self, micro_lenet: NetworkGraph
    ) -> None:
        micro_lenet.layer("gate1").g.data[[0, 3]] = [1e-4, -1e-4]
        selection = select_channels(micro_lenet, 0.0)
        assert selection.groups["conv1"].removed.tolist() == [0, 3]
        assert selection.signature == "4-8-128-16"

    def test_linear_uses_default_threshold(self) -> None:
        net = build_bn_testnet(
            GateKind.LINEAR, widths=(2, 4, 4), input_shape=SMALL_SHAPE
        )
        net.layer("bn1").gamma.data[:] = [2e-5, -0.3]
        selection = select_channels(net)
        assert selection.groups["block1"].kept.tolist() == [1]
        assert selection.groups["block1"].threshold == 1e-4

    def test_threshold_is_strict(self, micro_lenet: NetworkGraph) -> None:
        factor = float(micro_lenet.layer("gate1").factor()[0])
        with pytest.raises(DeadLayerError):
            select_channels(micro_lenet, factor)

    def test_negative_threshold(self, micro_lenet: NetworkGraph) -> None:
        with pytest.raises(ValueError):
            select_channels(micro_lenet, -0.1)

    def test_dead_layer_names_group(self, micro_lenet: NetworkGraph) -> None:
        micro_lenet.layer("gate4").g.data[:] = 0.0
        with pytest.raises(DeadLayerError) as info:
            select_channels(micro_lenet, 0.0)

        assert info.value.group == "fc1"

    def test_flatten_follows_parent_channel(self, micro_lenet: NetworkGraph) -> None:
        micro_lenet.layer("gate2").g.data[0] = 0.0
        selection = select_channels(micro_lenet, 0.0)
        flatten = selection.groups["flatten"]
        assert flatten.removed.tolist() == list(range(16))
        assert selection.signature == "6-7-112-16"


class TestCompaction:
    """Compactação física e fusão das portas."""

    def test_signature_and_shapes(self, sparse_lenet: NetworkGraph) -> None:
        outcome = prune(sparse_lenet, 0.0)
        net = outcome.net
        assert outcome.report.signature == "9-17-43-25"
        assert net.layer("conv1").weight.shape == (9, 1, 5, 5)
        assert net.layer("conv2").weight.shape == (17, 9, 5, 5)
        assert net.layer("fc1").weight.shape == (25, 43)
        assert net.layer("fc2").weight.shape == (10, 25)
        assert not any(layer.name.startswith("gate") for layer in net.layers)

    def test_pruned_matches_masked(self, sparse_lenet: NetworkGraph) -> None:
        x = np.random.default_rng(4).standard_normal((100, 1, 28, 28))
        x = x.astype(np.float32)
        masked = sparse_lenet.eval().forward(x).data
        pruned = prune(sparse_lenet, 0.0).net.forward(x).data
        np.testing.assert_allclose(pruned, masked, atol=1e-4)

    def test_masking_matches_removal_at_init(self, micro_lenet: NetworkGraph) -> None:
        micro_lenet.layer("gate1").g.data[[1, 4]] = 0.0
        micro_lenet.layer("gate2").g.data[2] = 0.0
        micro_lenet.layer("gate4").g.data[:5] = 0.0
        x = np.random.default_rng(8).standard_normal((100, 1, 28, 28))
        x = x.astype(np.float32)
        masked = micro_lenet.eval().forward(x).data
        pruned = prune(micro_lenet, 0.0)
        assert pruned.report.signature == "4-7-112-11"
        np.testing.assert_allclose(pruned.net.forward(x).data, masked, atol=1e-5)

    def test_merge_scales_producer_rows(self, micro_lenet: NetworkGraph) -> None:
        micro_lenet.layer("gate3").g.data[:] = 10.0
        before = micro_lenet.layer("fc1").weight.data.copy()
        after = merge_gates(micro_lenet).layer("fc1").weight.data
        np.testing.assert_allclose(after / before, 0.632121, atol=1e-5)

    def test_merge_with_batch_norm_keeps_eval_output(self) -> None:
        net = build_bn_testnet(input_shape=SMALL_SHAPE, seed=4)
        rng = np.random.default_rng(9)
        for index in (1, 2, 3):
            g = net.layer(f"gate{index}").g.data
            g[:] = rng.uniform(0.2, 2.0, g.size)

        net.layer("gate2").g.data[1] = 0.0
        for _ in range(20):
            net.forward(rng.standard_normal((8, *SMALL_SHAPE)).astype(np.float32))

        x = rng.standard_normal((6, *SMALL_SHAPE)).astype(np.float32)
        expected = net.eval().forward(x).data
        merged = merge_gates(net)
        np.testing.assert_allclose(
            merged.forward(x).data, expected, rtol=1e-4, atol=1e-5
        )
        assert list(merged.gated_groups()) == []

    def test_keep_all_is_identity(self, micro_lenet: NetworkGraph) -> None:
        compacted = compact(micro_lenet, select_channels(micro_lenet, 0.0))
        assert compacted.group_channels() == micro_lenet.group_channels()
        x = np.random.default_rng(2).standard_normal((10, 1, 28, 28))
        x = x.astype(np.float32)
        np.testing.assert_allclose(
            compacted.eval().forward(x).data,
            micro_lenet.eval().forward(x).data,
            atol=1e-6,
        )

    def test_unknown_group(self, micro_lenet: NetworkGraph) -> None:
        choice = ChannelSelection("nope", np.array([0]), np.array([], dtype=int), 0.0)
        with pytest.raises(SelectionError):
            compact(micro_lenet, Selection({"nope": choice}))

    def test_original_is_untouched(self, sparse_lenet: NetworkGraph) -> None:
        prune(sparse_lenet, 0.0)
        assert sparse_lenet.group_channels() == (20, 50, 800, 500)

    def test_linear_gates_stay_as_gamma(self) -> None:
        net = build_bn_testnet(
            GateKind.LINEAR, widths=(4, 4, 4), input_shape=SMALL_SHAPE
        )
        net.layer("bn2").gamma.data[:2] = 0.0
        outcome = prune(net, None)
        assert outcome.report.signature == "4-2-4"
        assert outcome.net.layer("bn2").gamma.shape == (2,)
        assert outcome.net.layer("conv3").weight.shape == (4, 2, 3, 3)


class TestAccounting:
    """Parâmetros, FLOPs e taxa de poda."""

    def test_conv_flops(self) -> None:
        conv = Conv2d.init("conv", 16, 32, 3, rng=np.random.default_rng(0), padding=1)
        net = NetworkGraph("single", [conv], [], (16, 32, 32))
        assert count_flops(net) == 9_437_184

    def test_untrained_net_prunes_nothing(self) -> None:
        outcome = prune(build_lenet5_caffe(), 0.0)
        assert outcome.report.signature == "20-50-800-500"
        assert outcome.report.pruning_rate == 0.0
        assert outcome.report.params_before == 430_500

    def test_pruning_rate(self, sparse_lenet: NetworkGraph) -> None:
        report = prune(sparse_lenet, 0.0).report
        kept = 9 * 25 + 17 * 9 * 25 + 25 * 43 + 10 * 25
        assert report.params_after == kept
        assert report.pruning_rate == pytest.approx(1.0 - kept / 430_500)
        assert pruning_rate_at(sparse_lenet, 0.0) == pytest.approx(report.pruning_rate)
        assert report.flops_after < report.flops_before

    def test_params_count_gates(self, micro_lenet: NetworkGraph) -> None:
        gates = sum(MICRO_WIDTHS[:2]) + MICRO_WIDTHS[1] * 16 + MICRO_WIDTHS[2]
        merged = merge_gates(micro_lenet)
        assert count_params(micro_lenet) - count_params(merged) == gates


class TestReport:
    """Serialização do relatório de poda."""

    def test_round_trip(self, sparse_lenet: NetworkGraph) -> None:
        report = prune(sparse_lenet, 0.0).report
        decoded = PruneReport.decode(report.encode())
        assert decoded == report
        assert decoded.groups[0].kept == tuple(range(0, 18, 2))
        assert len(decoded.groups[0].removed) == 11

    def test_tampered_signature(self, micro_lenet: NetworkGraph) -> None:
        payload = json.loads(prune(micro_lenet, 0.0).report.encode())
        payload["signature"] = "1-2-3-4"
        with pytest.raises(ValueError):
            PruneReport.decode(json.dumps(payload).encode())


class TestSweep:
    """Varredura de limiares com linhas de camada morta."""

    def test_rows_and_dead_threshold(
        self,
        micro_lenet: NetworkGraph,
        datasets: tuple[Dataset, Dataset],
        tmp_path: Path,
    ) -> None:
        micro_lenet.layer("gate1").g.data[:3] = 0.1
        _, test = datasets
        rows = threshold_sweep(micro_lenet, test, [0.0, 0.05, 0.5, 0.7])
        assert len(rows) == 4
        assert [row.dead for row in rows] == [False, False, False, True]
        assert rows[0].pruning_rate == 0.0
        assert rows[1].pruning_rate > 0.0
        assert rows[1].accuracy_before_ft == rows[1].accuracy_after_ft

        path = tmp_path / "sweep.csv"
        write_sweep_csv(rows, path)
        with path.open(newline="") as handle:
            lines = list(csv.reader(handle))

        assert tuple(lines[0]) == SWEEP_HEADER
        assert lines[4][1] == DEAD_LAYER_NOTE
        assert len(lines) == 5

    def test_rate_is_non_decreasing_in_threshold(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        rng = np.random.default_rng(12)
        for gate in ("gate1", "gate2", "gate3", "gate4"):
            g = micro_lenet.layer(gate).g.data
            g[:] = rng.uniform(0.05, 2.0, g.size)
            g[0] = 2.0

        thresholds = [0.0, 1e-3, 0.01, 0.1, 0.3, 0.6]
        rows = threshold_sweep(micro_lenet, datasets[1], thresholds)
        assert not any(row.dead for row in rows)
        rates = [row.pruning_rate for row in rows]
        assert rates == sorted(rates)
        assert rates[-1] > rates[0] == 0.0

    def test_empty_sweep_writes_header(self, tmp_path: Path) -> None:
        path = tmp_path / "sweep.csv"
        write_sweep_csv([], path)
        assert path.read_text().splitlines() == [",".join(SWEEP_HEADER)]

    def test_finetune_requires_train_set(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        with pytest.raises(ValueError):
            threshold_sweep(micro_lenet, datasets[1], [0.0], finetune_epochs=1)
