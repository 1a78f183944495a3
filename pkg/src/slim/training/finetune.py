"""Ajuste fino curto de uma rede podada, sem penalidade sobre as portas."""

from __future__ import annotations


import logging

from slim.data.mnist import Dataset
from slim.model import RegularizerKind
from slim.network import NetworkGraph
from slim.regularization import RegularizerSpec
from slim.tensor import MultiStepLR
from slim.training.metrics import evaluate
from slim.training.trainer import DEFAULT_BATCH_SIZE, DEFAULT_MOMENTUM, Trainer

logger = logging.getLogger(__name__)

MAX_FINETUNE_EPOCHS = 3
FINETUNE_LR = 0.01


def finetune(
    net: NetworkGraph,
    train: Dataset,
    validation: Dataset,
    epochs: int = MAX_FINETUNE_EPOCHS,
    *,
    lr: float = FINETUNE_LR,
    batch_size: int = DEFAULT_BATCH_SIZE,
    seed: int = 0,
) -> NetworkGraph:
    """Treina com `λ = 0` e devolve o modelo de melhor validação.

    O modelo de partida também concorre: se nenhuma época melhorar a acurácia de
    validação, ele é devolvido. Com `epochs = 0`, devolve o próprio `net`.

    Args:
        net (NetworkGraph): Rede podada (não é modificada).
        train (Dataset): Conjunto de treino.
        validation (Dataset): Conjunto usado na escolha do melhor modelo.
        epochs (int): Número de épocas.
        lr (float): Taxa de aprendizado constante.
        batch_size (int): Tamanho do lote.
        seed (int): Semente do embaralhamento.

    Returns:
        NetworkGraph: A melhor rede encontrada.
    """
    if epochs <= 0:
        return net

    best = net
    best_accuracy = evaluate(net, validation).accuracy
    candidate = net.clone()
    trainer = Trainer(
        candidate,
        RegularizerSpec(kind=RegularizerKind.L2, lambda1=0.0),
        lr_schedule=MultiStepLR(lr),
        momentum=DEFAULT_MOMENTUM,
        weight_decay=0.0,
        batch_size=batch_size,
        seed=seed,
    )
    for epoch in range(epochs):
        trainer.train_epoch(train)
        trainer.epoch += 1
        accuracy = evaluate(candidate, validation).accuracy
        logger.info(
            "[TREINO] Ajuste fino %d/%d: acurácia=%.2f%%",
            epoch + 1,
            epochs,
            100.0 * accuracy,
        )
        if accuracy > best_accuracy:
            best, best_accuracy = candidate.clone(), accuracy

    return best
