"""Perda total: entropia cruzada média do lote mais a penalidade sobre as portas."""

from __future__ import annotations


from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from slim.regularization.spec import RegularizerSpec, penalty, penalty_grad
from slim.tensor import Tensor
from slim.tensor.ops import softmax_cross_entropy

if TYPE_CHECKING:
    from slim.network.graph import NetworkGraph


@dataclass
class TotalLoss:
    """Perda de um lote, separada em tarefa e penalidade."""

    task: Tensor
    penalty: float
    gate_params: list[Tensor]
    penalty_grads: list[np.ndarray]

    @property
    def value(self) -> float:
        """Perda total `tarefa + penalidade`."""
        return self.task.item() + self.penalty

    def backward(self) -> None:
        """Propaga a perda da tarefa e soma o gradiente da penalidade às portas.

        Pesos `W` e portas `g` recebem gradiente no mesmo passo.
        """
        self.task.backward()
        for param, grad in zip(self.gate_params, self.penalty_grads):
            param.accumulate(grad)


def total_loss(
    images: np.ndarray | Tensor,
    labels: np.ndarray,
    network: NetworkGraph,
    spec: RegularizerSpec,
    epoch: int = 0,
) -> TotalLoss:
    """Calcula `Σ l(f(x, g, W), y)/N + λ·Σ R(g)` para um lote.

    Args:
        images (np.ndarray | Tensor): Lote de entradas.
        labels (np.ndarray): Rótulos do lote.
        network (NetworkGraph): Rede (em modo de treino durante o treinamento).
        spec (RegularizerSpec): Especificação do regularizador.
        epoch (int): Época corrente, para as agendas.

    Returns:
        TotalLoss: A perda com os gradientes da penalidade já calculados.
    """
    inputs = images if isinstance(images, Tensor) else Tensor(images)
    logits = network.forward(inputs)
    task = softmax_cross_entropy(logits, labels)
    gates = network.gate_params()
    return TotalLoss(
        task=task,
        penalty=penalty(gates, spec, epoch),
        gate_params=gates,
        penalty_grads=penalty_grad(gates, spec, epoch),
    )
