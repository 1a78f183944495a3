"""Interface para portas multiplicativas por canal."""

from __future__ import annotations


from typing import Protocol, runtime_checkable

import numpy as np

from slim.model import GateKind
from slim.tensor import Tensor


@runtime_checkable
class Gate(Protocol):
    """Interface para uma porta por canal (exponencial ou linear)."""

    kind: GateKind
    name: str

    @property
    def params(self) -> Tensor:
        """Parâmetros treináveis da porta (`g` ou `γ`), um por canal."""
        ...

    @property
    def channel_count(self) -> int:
        """Número de canais controlados pela porta."""
        ...

    def factor(self) -> np.ndarray:
        """Fator multiplicativo efetivo aplicado a cada canal.

        Returns:
            np.ndarray: Um fator por canal.
        """
        ...

    def values(self) -> np.ndarray:
        """Valores comparados ao limiar de poda, um por canal.

        Returns:
            np.ndarray: Valores de porta não negativos.
        """
        ...

    def gate_value(self, k: int) -> float:
        """Valor do canal `k` comparado ao limiar de poda.

        Args:
            k (int): Índice do canal.

        Returns:
            float: O valor da porta.
        """
        ...

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Aplica a porta sobre o eixo de canais de `x`.

        Args:
            x (Tensor): Entrada `[N, C, ...]`.
            training (bool): Modo de treino.
            rng (np.random.Generator | None): Não usado pelas portas.

        Returns:
            Tensor: Saída no mesmo formato.
        """
        ...
