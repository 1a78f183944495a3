"""Avaliação e log de métricas por época."""

from __future__ import annotations


import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from slim.data.mnist import Dataset
from slim.model import Mode
from slim.network import NetworkGraph
from slim.tensor import Tensor
from slim.tensor.ops import softmax_cross_entropy

EVAL_BATCH_SIZE = 1000


@dataclass(frozen=True)
class Evaluation:
    """Perda média e acurácia sobre um conjunto."""

    loss: float
    accuracy: float

    @property
    def error(self) -> float:
        """Erro de classificação `1 − acurácia`."""
        return 1.0 - self.accuracy


@dataclass(frozen=True)
class EpochRecord:
    """Linha do log de treino."""

    epoch: int
    train_loss: float
    task_loss: float
    penalty: float
    test_error: float
    sigma: float
    pruning_rate: float


METRICS_HEADER: tuple[str, ...] = tuple(f.name for f in fields(EpochRecord))


def evaluate(
    net: NetworkGraph, dataset: Dataset, batch_size: int = EVAL_BATCH_SIZE
) -> Evaluation:
    """Avalia a rede em modo de avaliação, restaurando o modo anterior.

    Args:
        net (NetworkGraph): A rede.
        dataset (Dataset): Conjunto avaliado.
        batch_size (int): Tamanho do lote.

    Returns:
        Evaluation: Perda média de entropia cruzada e acurácia.
    """
    previous = net.mode
    net.eval()
    total_loss = 0.0
    correct = 0
    try:
        for images, labels in dataset.batches(batch_size):
            logits = net.forward(Tensor(images))
            loss = softmax_cross_entropy(logits, labels)
            total_loss += loss.item() * len(labels)
            correct += int(np.sum(np.argmax(logits.data, axis=1) == labels))

    finally:
        net.mode = previous

    n = max(len(dataset), 1)
    return Evaluation(loss=total_loss / n, accuracy=correct / n)


def _format(value: float | int) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


def append_record(record: EpochRecord, path: Path) -> None:
    """Acrescenta uma linha ao log CSV, criando o cabeçalho se preciso."""
    new = not path.exists()
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        if new:
            writer.writerow(METRICS_HEADER)

        writer.writerow(_format(value) for value in astuple(record))


def read_records(path: Path) -> list[EpochRecord]:
    """Lê o log CSV gravado por `append_record`."""
    with path.open(newline="", encoding="utf-8") as handle:
        return [
            EpochRecord(
                epoch=int(row["epoch"]),
                **{
                    name: float(row[name])
                    for name in METRICS_HEADER
                    if name != "epoch"
                },
            )
            for row in csv.DictReader(handle)
        ]
