"""Laço de treino com SGD, penalidade sobre as portas e agendas por época."""

from __future__ import annotations


import logging
import math
from collections.abc import Callable
from typing import Any, TypedDict

import numpy as np

from slim.data.mnist import Dataset
from slim.errors import DeadLayerError, NonFiniteLossError
from slim.network import NetworkGraph
from slim.regularization import RegularizerSpec, total_loss
from slim.tensor import SGD, MultiStepLR
from slim.training.metrics import EpochRecord, evaluate

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 128
DEFAULT_LR = 0.1
DEFAULT_MOMENTUM = 0.9
_LOG_EVERY = 100


class TrainerState(TypedDict):
    """Estado serializável do treino, gravado no manifesto do checkpoint."""

    epoch: int
    shuffle_rng: dict[str, Any]
    network_rng: dict[str, Any]


class Trainer:
    """Treina uma rede minimizando entropia cruzada mais a penalidade das portas.

    O embaralhamento usa um gerador próprio, separado do gerador de dropout da
    rede; ambos fazem parte do estado para que uma execução retomada seja
    idêntica a uma execução contínua.
    """

    def __init__(
        self,
        net: NetworkGraph,
        spec: RegularizerSpec,
        *,
        lr_schedule: MultiStepLR | None = None,
        momentum: float = DEFAULT_MOMENTUM,
        weight_decay: float = 0.0,
        batch_size: int = DEFAULT_BATCH_SIZE,
        seed: int = 0,
        threshold: float | None = None,
    ) -> None:
        """Inicializa o treinador.

        Args:
            net (NetworkGraph): Rede treinada in-place.
            spec (RegularizerSpec): Regularizador sobre as portas.
            lr_schedule (MultiStepLR | None): Agenda da taxa de aprendizado;
                taxa constante 0.1 se `None`.
            momentum (float): Momento do SGD.
            weight_decay (float): Força λ2 do decaimento de pesos.
            batch_size (int): Tamanho do lote.
            seed (int): Semente do embaralhamento.
            threshold (float | None): Limiar usado na taxa de poda registrada a
                cada época; `None` usa o padrão da família de porta.
        """
        self.net = net
        self.spec = spec
        self.lr_schedule = lr_schedule or MultiStepLR(DEFAULT_LR)
        self.batch_size = batch_size
        self.threshold = threshold
        self.optimizer = SGD(
            net.parameters(),
            lr=self.lr_schedule.lr_at(0),
            momentum=momentum,
            weight_decay=weight_decay,
        )
        self.rng = np.random.default_rng(seed)
        self.epoch = 0

    def train_epoch(self, train: Dataset) -> tuple[float, float, float]:
        """Executa uma época sobre o conjunto de treino.

        Args:
            train (Dataset): Conjunto de treino.

        Returns:
            tuple[float, float, float]: Médias da perda total, da perda da tarefa
                e da penalidade, ponderadas pelo tamanho dos lotes.

        Raises:
            NonFiniteLossError: Se a perda de algum lote não for finita.
        """
        epoch = self.epoch
        self.optimizer.lr = self.lr_schedule.lr_at(epoch)
        self.net.train()
        totals = np.zeros(3)
        seen = 0
        batches = train.batches(self.batch_size, self.rng, shuffle=True)
        for index, (images, labels) in enumerate(batches):
            self.optimizer.zero_grad()
            loss = total_loss(images, labels, self.net, self.spec, epoch)
            if not math.isfinite(loss.value):
                raise self._diverged(epoch, index)

            loss.backward()
            if not self._grads_finite():
                raise self._diverged(epoch, index)

            self.optimizer.step()

            n = len(labels)
            totals += n * np.array([loss.value, loss.task.item(), loss.penalty])
            seen += n
            if index % _LOG_EVERY == 0:
                logger.debug(
                    "[TREINO] Época %d lote %d: perda=%.5f", epoch, index, loss.value
                )

        train_loss, task_loss, penalty = totals / max(seen, 1)
        return float(train_loss), float(task_loss), float(penalty)

    def _grads_finite(self) -> bool:
        return all(
            p.grad is None or bool(np.isfinite(p.grad).all())
            for p in self.optimizer.params
        )

    def _diverged(self, epoch: int, batch: int) -> NonFiniteLossError:
        return NonFiniteLossError(
            epoch,
            batch,
            self.optimizer.lr,
            self.spec.lambda_at(epoch),
            self.spec.sigma_at(epoch),
        )

    def current_pruning_rate(self) -> float:
        """Taxa de poda da rede atual no limiar configurado.

        Returns:
            float: A taxa; `nan` se o limiar removesse um grupo inteiro.
        """
        from slim.pruning import pruning_rate_at

        if not any(True for _ in self.net.gated_groups()):
            return 0.0

        try:
            return pruning_rate_at(self.net, self.threshold)

        except DeadLayerError as exc:
            logger.warning("[TREINO] %s", exc)
            return float("nan")

    def fit(
        self,
        train: Dataset,
        test: Dataset,
        epochs: int,
        *,
        on_epoch: Callable[[EpochRecord], None] | None = None,
    ) -> list[EpochRecord]:
        """Treina da época atual até `epochs`, avaliando ao fim de cada época.

        Args:
            train (Dataset): Conjunto de treino.
            test (Dataset): Conjunto de teste.
            epochs (int): Número total de épocas (não o número restante).
            on_epoch (Callable[[EpochRecord], None] | None): Chamado após cada
                época, já com `self.epoch` avançado (ex.: gravar checkpoint).

        Returns:
            list[EpochRecord]: Uma linha por época executada.
        """
        records = []
        while self.epoch < epochs:
            epoch = self.epoch
            train_loss, task_loss, penalty = self.train_epoch(train)
            result = evaluate(self.net, test)
            record = EpochRecord(
                epoch=epoch,
                train_loss=train_loss,
                task_loss=task_loss,
                penalty=penalty,
                test_error=result.error,
                sigma=self.spec.sigma_at(epoch),
                pruning_rate=self.current_pruning_rate(),
            )
            records.append(record)
            self.epoch = epoch + 1
            logger.info(
                "[TREINO] Época %d/%d: perda=%.4f tarefa=%.4f penalidade=%.4f "
                "erro=%.2f%% σ=%.4f poda=%.2f%%",
                epoch + 1,
                epochs,
                train_loss,
                task_loss,
                penalty,
                100.0 * record.test_error,
                record.sigma,
                100.0 * record.pruning_rate,
            )
            if on_epoch is not None:
                on_epoch(record)

        return records

    def state(self) -> TrainerState:
        """Estado do treino (época e geradores), sem os buffers de momento."""
        return {
            "epoch": self.epoch,
            "shuffle_rng": self.rng.bit_generator.state,
            "network_rng": self.net.rng.bit_generator.state,
        }

    def load_state(
        self, state: TrainerState, buffers: dict[str, np.ndarray] | None = None
    ) -> None:
        """Restaura o estado exportado por `state` e os buffers de momento.

        Args:
            state (TrainerState): Estado do treino.
            buffers (dict[str, np.ndarray] | None): Buffers de momento por nome
                de parâmetro.
        """
        self.epoch = state["epoch"]
        self.rng.bit_generator.state = state["shuffle_rng"]
        self.net.rng.bit_generator.state = state["network_rng"]
        if buffers is not None:
            self.optimizer.load_state(buffers)
