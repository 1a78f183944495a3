"""Poda completa (seleção, compactação, fusão) e varredura de limiares."""

from __future__ import annotations


import csv
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from slim.data.mnist import Dataset
from slim.errors import DeadLayerError
from slim.network import NetworkGraph
from slim.pruning.accounting import count_flops, count_params, pruning_rate
from slim.pruning.compaction import compact, merge_gates
from slim.pruning.report import PruneReport, build_report
from slim.pruning.selection import select_channels
from slim.training import evaluate, finetune

logger = logging.getLogger(__name__)

SWEEP_HEADER: tuple[str, ...] = (
    "threshold",
    "pruning_rate",
    "params_after",
    "flops_after",
    "accuracy_before_ft",
    "accuracy_after_ft",
)
DEAD_LAYER_NOTE = "removes all channels"


@dataclass(frozen=True)
class PruneOutcome:
    """Rede podada com as portas fundidas e o relatório correspondente."""

    net: NetworkGraph
    report: PruneReport


def prune(net: NetworkGraph, threshold: float | None = None) -> PruneOutcome:
    """Seleciona, compacta, funde as portas e monta o relatório.

    Args:
        net (NetworkGraph): Rede treinada com portas (não é modificada).
        threshold (float | None): Limiar; `None` usa o padrão de cada família.

    Returns:
        PruneOutcome: A rede podada, em modo de avaliação, e o relatório.

    Raises:
        DeadLayerError: Se algum grupo perder todos os canais.
    """
    selection = select_channels(net, threshold)
    pruned = merge_gates(compact(net, selection)).eval()
    report = build_report(net, pruned, selection)
    logger.info(
        "[PODA] Assinatura %s, taxa de poda %.2f%% (limiar %g)",
        report.signature,
        100.0 * report.pruning_rate,
        report.threshold,
    )
    return PruneOutcome(pruned, report)


def pruning_rate_at(net: NetworkGraph, threshold: float | None = None) -> float:
    """Taxa de poda que `prune` obteria no limiar, sem registrar o relatório."""
    selection = select_channels(net, threshold)
    after = merge_gates(compact(net, selection))
    return pruning_rate(count_params(merge_gates(net)), count_params(after))


@dataclass(frozen=True)
class SweepRow:
    """Linha da varredura; `dead` marca limiares que removeriam um grupo inteiro."""

    threshold: float
    pruning_rate: float | None = None
    params_after: int | None = None
    flops_after: int | None = None
    accuracy_before_ft: float | None = None
    accuracy_after_ft: float | None = None
    dead: bool = False


def threshold_sweep(
    net: NetworkGraph,
    test: Dataset,
    thresholds: Sequence[float],
    *,
    train: Dataset | None = None,
    finetune_epochs: int = 0,
    seed: int = 0,
) -> list[SweepRow]:
    """Poda a rede em cada limiar e mede a acurácia antes e depois do ajuste fino.

    Limiares que removeriam todos os canais de um grupo viram linhas marcadas
    como `dead`, sem interromper a varredura.

    Args:
        net (NetworkGraph): Rede treinada com portas.
        test (Dataset): Conjunto de avaliação.
        thresholds (Sequence[float]): Limiares, na ordem desejada.
        train (Dataset | None): Conjunto do ajuste fino (obrigatório se
            `finetune_epochs > 0`).
        finetune_epochs (int): Épocas de ajuste fino por limiar.
        seed (int): Semente do ajuste fino.

    Returns:
        list[SweepRow]: Uma linha por limiar.

    Raises:
        ValueError: Se houver ajuste fino sem conjunto de treino.
    """
    if finetune_epochs > 0 and train is None:
        raise ValueError("Ajuste fino na varredura exige o conjunto de treino")

    rows = []
    for threshold in thresholds:
        try:
            outcome = prune(net, threshold)

        except DeadLayerError as exc:
            logger.warning("[PODA] Limiar %g: %s", threshold, exc)
            rows.append(SweepRow(threshold=threshold, dead=True))
            continue

        before = evaluate(outcome.net, test).accuracy
        after = before
        if finetune_epochs > 0:
            tuned = finetune(outcome.net, train, test, finetune_epochs, seed=seed)
            after = evaluate(tuned, test).accuracy

        rows.append(
            SweepRow(
                threshold=threshold,
                pruning_rate=outcome.report.pruning_rate,
                params_after=outcome.report.params_after,
                flops_after=count_flops(outcome.net),
                accuracy_before_ft=before,
                accuracy_after_ft=after,
            )
        )

    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: Path) -> None:
    """Grava a varredura em CSV; linhas mortas levam a nota na coluna da taxa.

    Args:
        rows (Sequence[SweepRow]): Linhas de `threshold_sweep`.
        path (Path): Arquivo de saída.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            if row.dead:
                writer.writerow([repr(row.threshold), DEAD_LAYER_NOTE, "", "", "", ""])
                continue

            writer.writerow(
                [
                    repr(row.threshold),
                    repr(row.pruning_rate),
                    row.params_after,
                    row.flops_after,
                    repr(row.accuracy_before_ft),
                    repr(row.accuracy_after_ft),
                ]
            )
