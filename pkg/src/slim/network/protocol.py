"""Interface para as camadas de uma rede."""

from __future__ import annotations


from typing import Protocol, runtime_checkable

import numpy as np

from slim.tensor import Tensor


@runtime_checkable
class Layer(Protocol):
    """Interface para uma camada do grafo de rede.

    Formatos em `output_shape` excluem o eixo do lote.
    """

    name: str

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Aplica a camada.

        Args:
            x (Tensor): Entrada com eixo de lote.
            training (bool): Modo de treino.
            rng (np.random.Generator | None): Gerador para camadas estocásticas.

        Returns:
            Tensor: A saída da camada.
        """
        ...

    def parameters(self) -> list[Tensor]:
        """Parâmetros treináveis da camada.

        Returns:
            list[Tensor]: Lista possivelmente vazia.
        """
        ...

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """Formato da saída para uma entrada de formato `shape` (sem lote).

        Args:
            shape (tuple[int, ...]): Formato da entrada, sem o eixo do lote.

        Returns:
            tuple[int, ...]: Formato da saída, sem o eixo do lote.
        """
        ...
