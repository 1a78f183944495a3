"""SGD com momento e decaimento de pesos, e agenda de taxa de aprendizado por marcos."""

from __future__ import annotations


from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from slim.tensor.tensor import Tensor


def sgd_step(
    params: Sequence[Tensor],
    buffers: list[np.ndarray | None],
    *,
    lr: float,
    momentum: float,
    weight_decay: float,
) -> None:
    """Aplica um passo de SGD in-place.

    O gradiente efetivo é `grad + weight_decay·θ` (a penalidade ℓ2 com força λ2);
    o buffer de momento é atualizado antes do parâmetro:
    `buf ← momentum·buf + grad_efetivo` e `θ ← θ − lr·buf`. No primeiro passo o
    buffer é o próprio gradiente efetivo.

    Args:
        params (Sequence[Tensor]): Parâmetros treináveis.
        buffers (list[np.ndarray | None]): Buffers de momento, alinhados a
            `params`; atualizados in-place.
        lr (float): Taxa de aprendizado.
        momentum (float): Coeficiente de momento.
        weight_decay (float): Força λ2 do decaimento de pesos.
    """
    for index, param in enumerate(params):
        if param.grad is None:
            continue

        step = param.grad
        if weight_decay:
            step = step + weight_decay * param.data

        if momentum:
            buffer = buffers[index]
            if buffer is None:
                buffer = np.array(step, dtype=param.dtype)

            else:
                buffer *= momentum
                buffer += step

            buffers[index] = buffer
            step = buffer

        param.data -= (lr * step).astype(param.dtype)


class SGD:
    """Otimizador SGD que guarda os buffers de momento de cada parâmetro."""

    def __init__(
        self,
        params: Iterable[Tensor],
        lr: float = 0.1,
        momentum: float = 0.9,
        weight_decay: float = 0.0,
    ) -> None:
        """Inicializa o otimizador.

        Args:
            params (Iterable[Tensor]): Parâmetros treináveis.
            lr (float): Taxa de aprendizado inicial.
            momentum (float): Coeficiente de momento.
            weight_decay (float): Força λ2 do decaimento de pesos.
        """
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.buffers: list[np.ndarray | None] = [None] * len(self.params)

    def zero_grad(self) -> None:
        """Descarta os gradientes de todos os parâmetros."""
        for param in self.params:
            param.zero_grad()

    def step(self) -> None:
        """Aplica um passo de SGD com os gradientes acumulados."""
        sgd_step(
            self.params,
            self.buffers,
            lr=self.lr,
            momentum=self.momentum,
            weight_decay=self.weight_decay,
        )

    def state(self) -> dict[str, np.ndarray]:
        """Exporta os buffers de momento existentes, indexados pelo nome do parâmetro.

        Returns:
            dict[str, np.ndarray]: Buffers por nome de parâmetro.
        """
        return {
            param.name or str(index): buffer
            for index, (param, buffer) in enumerate(zip(self.params, self.buffers))
            if buffer is not None
        }

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        """Restaura buffers exportados por `state`.

        Args:
            state (dict[str, np.ndarray]): Buffers por nome de parâmetro.
        """
        for index, param in enumerate(self.params):
            buffer = state.get(param.name or str(index))
            self.buffers[index] = None if buffer is None else buffer.copy()


@dataclass(frozen=True)
class MultiStepLR:
    """Taxa de aprendizado multiplicada por `gamma` em cada marco de época."""

    base_lr: float
    milestones: tuple[int, ...] = field(default_factory=tuple)
    gamma: float = 0.1

    def lr_at(self, epoch: int) -> float:
        """Retorna a taxa de aprendizado vigente na época (a partir de 0).

        Args:
            epoch (int): Índice da época.

        Returns:
            float: A taxa de aprendizado.
        """
        drops = sum(1 for milestone in self.milestones if epoch >= milestone)
        return self.base_lr * self.gamma**drops
