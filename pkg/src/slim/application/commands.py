"""Comandos da CLI: treino, poda, ajuste fino, varredura, avaliação e relatório.

Cada comando lê e grava arquivos na pasta da execução; os comandos se compõem
apenas por esses arquivos:

    config.txt        configuração efetiva
    run.log           cópia do log do treino
    metrics.csv       uma linha por época
    checkpoint.slim   rede treinada (gravada a cada época)
    pruned.slim       rede podada com as portas fundidas
    prune_report.json relatório da poda
    finetuned.slim    rede podada após o ajuste fino
    sweep.csv         varredura de limiares
    summary.json      campos agregados pelo comando `report`
"""

from __future__ import annotations


import logging
import math
from collections.abc import Sequence
from dataclasses import asdict
from pathlib import Path
from typing import Any

from slim.application.summary import update_summary, write_report
from slim.data import (
    Checkpoint,
    Dataset,
    RunConfig,
    config_to_text,
    load_checkpoint,
    load_mnist,
    parse_config_text,
    resolve_config,
    save_checkpoint,
    write_config,
)
from slim.data.presets import METHOD_LABELS
from slim.network import NetworkGraph, build_network
from slim.pruning import PruneOutcome, prune, threshold_sweep, write_sweep_csv
from slim.regularization import spec_to_dict
from slim.training import (
    EpochRecord,
    Evaluation,
    Trainer,
    append_record,
    evaluate,
    finetune,
    read_records,
)

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.slim"
PRUNED_NAME = "pruned.slim"
FINETUNED_NAME = "finetuned.slim"
METRICS_NAME = "metrics.csv"
LOG_NAME = "run.log"
PRUNE_REPORT_NAME = "prune_report.json"
SWEEP_NAME = "sweep.csv"


def load_datasets(config: RunConfig, directory: Path) -> tuple[Dataset, Dataset]:
    """Carrega o MNIST e aplica `train.subset` ao conjunto de treino.

    Args:
        config (RunConfig): Configuração da execução.
        directory (Path): Pasta com os arquivos IDX.

    Returns:
        tuple[Dataset, Dataset]: Conjuntos de treino e de teste.
    """
    train, test = load_mnist(directory)
    if config.train_subset > 0:
        train = train.subset(config.train_subset)
        logger.info("[DADOS] Usando %d exemplos de treino", len(train))

    return train, test


def config_from_checkpoint(checkpoint: Checkpoint) -> RunConfig:
    """Configuração gravada no checkpoint; padrões se não houver."""
    text = checkpoint.meta.get("config")
    return resolve_config(parse_config_text(text) if text else None)


def _build_trainer(net: NetworkGraph, config: RunConfig) -> Trainer:
    return Trainer(
        net,
        config.regularizer(),
        lr_schedule=config.lr_schedule(),
        momentum=config.train_momentum,
        weight_decay=config.regularizer_lambda2,
        batch_size=config.train_batch_size,
        seed=config.seed,
        threshold=config.prune_threshold,
    )


def _run_fields(config: RunConfig, out: Path) -> dict[str, Any]:
    return {
        "run": out.name,
        "method": METHOD_LABELS[config.regularizer_kind],
        "gate_kind": config.gate_kind.value,
        "lambda1": config.regularizer_lambda1,
        "lambda2": config.regularizer_lambda2,
    }


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _resume(config: RunConfig, path: Path, metrics: Path) -> Trainer:
    checkpoint = load_checkpoint(path)
    trainer = _build_trainer(checkpoint.net, config)
    trainer.load_state(checkpoint.meta["trainer"], checkpoint.extra)

    # O log pode ter linhas além da última época gravada no checkpoint.
    kept = []
    if metrics.exists():
        kept = [r for r in read_records(metrics) if r.epoch < trainer.epoch]

    metrics.unlink(missing_ok=True)
    for record in kept:
        append_record(record, metrics)

    logger.info("[TREINO] Retomando a partir da época %d", trainer.epoch)
    return trainer


def cmd_train(
    config: RunConfig,
    datasets: tuple[Dataset, Dataset],
    *,
    resume: bool = False,
) -> list[EpochRecord]:
    """Treina a rede descrita pela configuração, gravando checkpoint a cada época.

    Args:
        config (RunConfig): Configuração efetiva.
        datasets (tuple[Dataset, Dataset]): Conjuntos de treino e de teste.
        resume (bool): Se `True` e houver checkpoint na pasta, continua dele.

    Returns:
        list[EpochRecord]: As linhas do log executadas nesta chamada.

    Raises:
        NonFiniteLossError: Se a perda divergir.
    """
    out = Path(config.out)
    write_config(config, out)
    path = out / CHECKPOINT_NAME
    metrics = out / METRICS_NAME

    if resume and path.exists():
        trainer = _resume(config, path, metrics)

    else:
        metrics.unlink(missing_ok=True)
        net = build_network(config.model, config.gate_kind, seed=config.seed)
        trainer = _build_trainer(net, config)

    def on_epoch(record: EpochRecord) -> None:
        meta: dict[str, Any] = {
            "stage": "train",
            "config": config_to_text(config),
            "regularizer": spec_to_dict(trainer.spec),
            "trainer": trainer.state(),
            "epoch": trainer.epoch,
            "seed": config.seed,
            "metrics": asdict(record),
        }
        append_record(record, metrics)
        save_checkpoint(trainer.net, path, meta, trainer.optimizer.state())

    train, test = datasets
    records = trainer.fit(train, test, config.train_epochs, on_epoch=on_epoch)

    last = records[-1] if records else None
    update_summary(
        out,
        **_run_fields(config, out),
        stage="train",
        error_pct=None if last is None else 100.0 * last.test_error,
        pruning_rate=None if last is None else _finite_or_none(last.pruning_rate),
    )
    return records


def cmd_prune(
    checkpoint_path: Path,
    config: RunConfig,
    test: Dataset | None = None,
) -> PruneOutcome:
    """Poda um checkpoint treinado com portas no limiar `prune.threshold`.

    Grava `pruned.slim` e `prune_report.json` na pasta `config.out`.

    Args:
        checkpoint_path (Path): Checkpoint treinado.
        config (RunConfig): Configuração efetiva.
        test (Dataset | None): Se informado, mede o erro da rede podada.

    Returns:
        PruneOutcome: A rede podada e o relatório.

    Raises:
        DeadLayerError: Se algum grupo perder todos os canais.
    """
    out = Path(config.out)
    checkpoint = load_checkpoint(checkpoint_path)
    outcome = prune(checkpoint.net, config.prune_threshold)

    report = outcome.report
    out.mkdir(parents=True, exist_ok=True)
    (out / PRUNE_REPORT_NAME).write_bytes(report.encode())
    save_checkpoint(
        outcome.net,
        out / PRUNED_NAME,
        checkpoint.meta | {"stage": "prune", "signature": report.signature},
    )

    error = None
    if test is not None:
        error = 100.0 * evaluate(outcome.net, test).error
        logger.info("[PODA] Erro de teste antes do ajuste fino: %.2f%%", error)

    update_summary(
        out,
        **_run_fields(config, out),
        stage="prune",
        signature=report.signature,
        pruning_rate=report.pruning_rate,
        error_pct=error,
    )
    return outcome


def cmd_finetune(
    checkpoint_path: Path,
    config: RunConfig,
    datasets: tuple[Dataset, Dataset],
) -> NetworkGraph:
    """Ajusta uma rede podada por `finetune.epochs` épocas e grava `finetuned.slim`."""
    out = Path(config.out)
    checkpoint = load_checkpoint(checkpoint_path)
    train, test = datasets
    tuned = finetune(
        checkpoint.net,
        train,
        test,
        config.finetune_epochs,
        lr=config.finetune_lr,
        batch_size=config.train_batch_size,
        seed=config.seed,
    )
    error = 100.0 * evaluate(tuned, test).error
    logger.info("[TREINO] Erro de teste após ajuste fino: %.2f%%", error)

    meta = checkpoint.meta | {"stage": "finetune"}
    save_checkpoint(tuned, out / FINETUNED_NAME, meta)
    update_summary(out, **_run_fields(config, out), stage="finetune", error_pct=error)
    return tuned


def cmd_sweep(
    checkpoint_path: Path,
    config: RunConfig,
    thresholds: Sequence[float],
    datasets: tuple[Dataset, Dataset] | None,
    *,
    finetune_epochs: int = 0,
) -> Path:
    """Varre limiares sobre um checkpoint treinado e grava `sweep.csv`.

    Args:
        checkpoint_path (Path): Checkpoint treinado com portas.
        config (RunConfig): Configuração efetiva.
        thresholds (Sequence[float]): Limiares; vazio grava só o cabeçalho.
        datasets (tuple[Dataset, Dataset] | None): Treino e teste; pode ser
            `None` apenas com a lista de limiares vazia.
        finetune_epochs (int): Épocas de ajuste fino por limiar.

    Returns:
        Path: O CSV gravado.
    """
    path = Path(config.out) / SWEEP_NAME
    rows = []
    if thresholds:
        if datasets is None:
            raise ValueError("Varredura com limiares exige os conjuntos de dados")

        net = load_checkpoint(checkpoint_path).net
        train, test = datasets
        rows = threshold_sweep(
            net,
            test,
            thresholds,
            train=train,
            finetune_epochs=finetune_epochs,
            seed=config.seed,
        )

    write_sweep_csv(rows, path)
    logger.info("[PODA] Varredura com %d limiares gravada em %s", len(rows), path)
    return path


def cmd_eval(checkpoint_path: Path, test: Dataset) -> Evaluation:
    """Erro de teste de qualquer checkpoint."""
    net = load_checkpoint(checkpoint_path).net
    result = evaluate(net, test)
    logger.info(
        "[CLI] %s: erro=%.2f%% perda=%.4f",
        checkpoint_path,
        100.0 * result.error,
        result.loss,
    )
    return result


def cmd_report(root: Path, out: Path | None = None) -> tuple[Path, Path]:
    """Consolida os `summary.json` das execuções de `root` em Markdown e CSV."""
    return write_report(root, out)
