"""Testes do laço de treino, da retomada, do ajuste fino e do log de métricas."""

from __future__ import annotations


import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
from conftest import MICRO_WIDTHS

from slim.application import cmd_finetune, cmd_prune, cmd_train
from slim.application.commands import CHECKPOINT_NAME, PRUNED_NAME
from slim.data import (
    Dataset,
    RunConfig,
    deserialize,
    load_checkpoint,
    load_mnist,
    preset_overrides,
    resolve_config,
    serialize,
)
from slim.errors import NonFiniteLossError
from slim.model import GateKind, RegularizerKind
from slim.network import NetworkGraph, build_lenet5_caffe
from slim.pruning import (
    channel_fraction_removed,
    prune,
    select_channels,
    threshold_sweep,
)
from slim.regularization import RegularizerSpec
from slim.training import (
    METRICS_HEADER,
    EpochRecord,
    Trainer,
    append_record,
    evaluate,
    finetune,
    read_records,
)

BOUNDED = RegularizerSpec(RegularizerKind.BOUNDED_L1, lambda1=4e-3)


def _trainer(net: NetworkGraph, spec: RegularizerSpec = BOUNDED) -> Trainer:
    return Trainer(net, spec, batch_size=16, seed=3)


def _assert_same_weights(a: NetworkGraph, b: NetworkGraph) -> None:
    for pa, pb in zip(a.parameters(), b.parameters()):
        np.testing.assert_array_equal(pa.data, pb.data)


class TestEvaluate:
    """Avaliação em modo eval."""

    def test_restores_mode(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        result = evaluate(micro_lenet.train(), datasets[1], batch_size=10)
        assert micro_lenet.mode == "train"
        assert 0.0 <= result.accuracy <= 1.0
        assert result.error == pytest.approx(1.0 - result.accuracy)
        assert result.loss > 0.0

    def test_batch_size_does_not_matter(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        a = evaluate(micro_lenet, datasets[1], batch_size=7)
        b = evaluate(micro_lenet, datasets[1])
        assert a.accuracy == b.accuracy
        assert a.loss == pytest.approx(b.loss, rel=1e-5)


class TestTrainer:
    """Épocas, determinismo e retomada."""

    def test_fit_records(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        trainer = _trainer(micro_lenet)
        seen: list[int] = []
        records = trainer.fit(*datasets, 2, on_epoch=lambda r: seen.append(r.epoch))
        assert [r.epoch for r in records] == [0, 1] == seen
        assert trainer.epoch == 2
        gates = sum(p.size for p in micro_lenet.gate_params())
        for record in records:
            assert math.isfinite(record.train_loss)
            assert 0.0 <= record.penalty <= 4e-3 * gates
            assert record.train_loss == pytest.approx(
                record.task_loss + record.penalty, rel=1e-5
            )
            assert record.sigma == 1.0

    def test_fit_is_deterministic(self, datasets: tuple[Dataset, Dataset]) -> None:
        nets = [build_lenet5_caffe(widths=MICRO_WIDTHS, seed=7) for _ in range(2)]
        runs = [_trainer(net).fit(*datasets, 2) for net in nets]
        assert runs[0] == runs[1]
        _assert_same_weights(*nets)

    def test_fit_stops_at_total_epochs(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        trainer = _trainer(micro_lenet)
        trainer.fit(*datasets, 1)
        assert trainer.fit(*datasets, 1) == []

    def test_resume_matches_straight_run(
        self, datasets: tuple[Dataset, Dataset]
    ) -> None:
        straight = build_lenet5_caffe(widths=MICRO_WIDTHS, seed=7)
        expected = _trainer(straight).fit(*datasets, 2)

        first = _trainer(build_lenet5_caffe(widths=MICRO_WIDTHS, seed=7))
        first.fit(*datasets, 1)
        raw = serialize(first.net, {"trainer": first.state()}, first.optimizer.state())

        checkpoint = deserialize(raw)
        resumed = _trainer(checkpoint.net)
        resumed.load_state(checkpoint.meta["trainer"], checkpoint.extra)
        tail = resumed.fit(*datasets, 2)

        assert tail == expected[1:]
        _assert_same_weights(resumed.net, straight)

    def test_non_finite_loss(self, micro_lenet: NetworkGraph) -> None:
        bad = Dataset(
            np.full((8, 1, 28, 28), np.nan, dtype=np.float32),
            np.zeros(8, dtype=np.int64),
        )
        with pytest.raises(NonFiniteLossError) as info:
            _trainer(micro_lenet).fit(bad, bad, 1)

        assert (info.value.epoch, info.value.batch) == (0, 0)
        assert info.value.lambda1 == 4e-3

    def test_nan_weight_stops_before_step(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        micro_lenet.parameters()[0].data[0, 0, 0, 0] = np.nan
        before = [p.data.copy() for p in micro_lenet.parameters()]
        with pytest.raises(NonFiniteLossError):
            _trainer(micro_lenet).fit(*datasets, 1)

        for old, param in zip(before, micro_lenet.parameters()):
            np.testing.assert_array_equal(param.data, old)

    def test_no_penalty_prunes_nothing(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        spec = RegularizerSpec(RegularizerKind.BOUNDED_L1, lambda1=0.0)
        records = _trainer(micro_lenet, spec).fit(*datasets, 2)
        assert [r.pruning_rate for r in records] == [0.0, 0.0]
        assert all(r.penalty == 0.0 for r in records)

    def test_ungated_net_reports_zero_rate(
        self, datasets: tuple[Dataset, Dataset]
    ) -> None:
        net = build_lenet5_caffe(GateKind.NONE, widths=MICRO_WIDTHS)
        spec = RegularizerSpec(RegularizerKind.L2)
        trainer = Trainer(net, spec, batch_size=16, weight_decay=5e-4)
        records = trainer.fit(*datasets, 1)
        assert records[0].pruning_rate == 0.0

    def test_dead_layer_rate_is_nan(self, micro_lenet: NetworkGraph) -> None:
        trainer = Trainer(micro_lenet, BOUNDED, batch_size=16, threshold=0.99)
        assert math.isnan(trainer.current_pruning_rate())


class TestFinetune:
    """Ajuste fino com seleção pelo melhor modelo de validação."""

    def test_zero_epochs_returns_same_net(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        assert finetune(micro_lenet, *datasets, 0) is micro_lenet

    def test_never_worse_than_start(
        self, micro_lenet: NetworkGraph, datasets: tuple[Dataset, Dataset]
    ) -> None:
        train, test = datasets
        pruned = prune(micro_lenet, 0.0).net
        start = evaluate(pruned, test).accuracy
        tuned = finetune(pruned, train, test, 2, batch_size=16)
        assert evaluate(tuned, test).accuracy >= start
        assert tuned.group_channels() == pruned.group_channels()


class TestMetricsLog:
    """Log CSV por época."""

    def test_round_trip(self, tmp_path: Path) -> None:
        path = tmp_path / "metrics.csv"
        records = [
            EpochRecord(0, 2.5, 2.3, 0.2, 0.9, 1.0, 0.0),
            EpochRecord(1, 1.25, 1.2, 0.05, 0.1, 0.99, float("nan")),
        ]
        for record in records:
            append_record(record, path)

        assert path.read_text().splitlines()[0] == ",".join(METRICS_HEADER)
        loaded = read_records(path)
        assert loaded[0] == records[0]
        assert math.isnan(loaded[1].pruning_rate)
        assert loaded[1].sigma == 0.99


@pytest.mark.slow
class TestMnist:
    """Execuções curtas sobre o MNIST real."""

    def test_bounded_training_learns(self, mnist_dir: Path) -> None:
        train, test = load_mnist(mnist_dir)
        net = build_lenet5_caffe(seed=0)
        trainer = Trainer(net, BOUNDED, batch_size=128, seed=0)
        records = trainer.fit(train.subset(5000), test.subset(1000), 1)
        assert records[0].test_error < 0.5

    def test_pruned_net_keeps_accuracy(self, mnist_dir: Path) -> None:
        train, test = load_mnist(mnist_dir)
        net = build_lenet5_caffe(seed=0)
        Trainer(net, BOUNDED, seed=0).fit(train.subset(5000), test.subset(1000), 2)
        before = evaluate(net, test).accuracy
        outcome = prune(net, 0.0)
        assert evaluate(outcome.net, test).accuracy == pytest.approx(before, abs=1e-3)


@dataclass(frozen=True)
class SmokeRun:
    """Execução curta de um preset, treinada uma vez por módulo."""

    config: RunConfig
    records: list[EpochRecord]
    checkpoint: Path


@pytest.fixture(scope="module")
def mnist(mnist_dir: Path) -> tuple[Dataset, Dataset]:
    return load_mnist(mnist_dir)


@pytest.fixture(scope="module")
def smoke_runs(
    mnist: tuple[Dataset, Dataset], tmp_path_factory: pytest.TempPathFactory
) -> dict[str, SmokeRun]:
    runs = {}
    for name in ("l2", "l1", "bounded_l1"):
        out = tmp_path_factory.mktemp(name)
        config = resolve_config(preset_overrides(f"{name}_smoke"), {"out": str(out)})
        records = cmd_train(config, mnist)
        runs[name] = SmokeRun(config, records, out / CHECKPOINT_NAME)

    return runs


def _removed_fraction(run: SmokeRun, threshold: float | None = None) -> float:
    net = load_checkpoint(run.checkpoint).net
    return channel_fraction_removed(select_channels(net, threshold))


@pytest.mark.slow
class TestAcceptance:
    """Presets `*_smoke` da LeNet5-Caffe no MNIST completo."""

    def test_bounded_l1_shrinks_every_group(
        self, smoke_runs: dict[str, SmokeRun], mnist: tuple[Dataset, Dataset]
    ) -> None:
        run = smoke_runs["bounded_l1"]
        report = cmd_prune(run.checkpoint, run.config, mnist[1]).report
        kept = [int(count) for count in report.signature.split("-")]
        assert all(k < full for k, full in zip(kept, (20, 50, 800, 500)))
        assert report.pruning_rate >= 0.8

        pruned = run.checkpoint.parent / PRUNED_NAME
        tuned = cmd_finetune(pruned, run.config, mnist)
        assert run.config.finetune_epochs <= 3
        assert evaluate(tuned, mnist[1]).error <= 0.02

    def test_l1_threshold_zero_is_nearly_optimal(
        self, smoke_runs: dict[str, SmokeRun], mnist: tuple[Dataset, Dataset]
    ) -> None:
        run = smoke_runs["l1"]
        assert _removed_fraction(run, 0.0) >= 0.3

        net = load_checkpoint(run.checkpoint).net
        at_zero, at_limit = threshold_sweep(net, mnist[1], [0.0, 1e-3])
        assert not at_zero.dead and not at_limit.dead
        gap = abs(at_zero.accuracy_before_ft - at_limit.accuracy_before_ft)
        assert gap <= 0.002

    def test_sparse_regularizers_prune_more_than_l2(
        self, smoke_runs: dict[str, SmokeRun]
    ) -> None:
        fractions = {name: _removed_fraction(run) for name, run in smoke_runs.items()}
        assert fractions["l1"] >= 2 * fractions["l2"]
        assert fractions["bounded_l1"] >= 2 * fractions["l2"]
        assert fractions["bounded_l1"] > fractions["l2"]

        errors = {name: run.records[-1].test_error for name, run in smoke_runs.items()}
        assert errors["bounded_l1"] <= errors["l1"] + 0.002
