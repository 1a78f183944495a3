"""Porta linear: a escala `γ` da normalização em lote que segue a convolução."""

from __future__ import annotations


from typing import TYPE_CHECKING

import numpy as np

from slim.model import GateKind
from slim.tensor import Tensor

if TYPE_CHECKING:
    from slim.network.impl.layers import BatchNorm2d


class LinearGate:
    """Porta linear que aponta para o `γ` de uma camada de normalização em lote.

    Não possui parâmetros próprios: regularização e poda leem e escrevem o mesmo
    `γ` da camada. O forward é a identidade, pois a escala já acontece dentro da
    normalização (`γ·x̂ + β`).
    """

    kind = GateKind.LINEAR

    def __init__(self, bn: BatchNorm2d) -> None:
        """Inicializa a porta sobre a camada de normalização.

        Args:
            bn (BatchNorm2d): Camada cujo `γ` serve de porta.
        """
        self.bn = bn
        self.name = f"{bn.name}.gamma"

    @property
    def params(self) -> Tensor:
        """O `γ` da camada de normalização (mesmo objeto)."""
        return self.bn.gamma

    @property
    def channel_count(self) -> int:
        """Número de canais."""
        return self.bn.gamma.size

    def factor(self) -> np.ndarray:
        """Escala `γ` por canal."""
        return self.bn.gamma.data.copy()

    def values(self) -> np.ndarray:
        """Valores de porta: `|γ|`."""
        return np.abs(self.bn.gamma.data)

    def gate_value(self, k: int) -> float:
        """`|γ_k|`."""
        return float(abs(self.bn.gamma.data[k]))

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Identidade."""
        return x
