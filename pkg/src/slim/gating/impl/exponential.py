"""Porta exponencial: cada canal é multiplicado por `1 − e^{−g²}`."""

from __future__ import annotations


import numpy as np

from slim.errors import DimensionError
from slim.model import GateKind, LayerKind
from slim.tensor import DEFAULT_DTYPE, Tensor
from slim.tensor.ops import exp_gate

INITIAL_G: float = 1.0


class ExponentialGate:
    """Camada de portas exponenciais, com um parâmetro treinável `g` por canal.

    O fator `1 − e^{−g²}` fica em `[0, 1)`, é par em `g` e vale exatamente zero
    quando `g = 0`, o que zera o canal inteiro independentemente da entrada.
    """

    kind = GateKind.EXPONENTIAL
    layer_kind = LayerKind.EXP_GATE

    def __init__(
        self,
        name: str,
        channels: int,
        *,
        init: float = INITIAL_G,
        dtype: type = DEFAULT_DTYPE,
    ) -> None:
        """Inicializa a porta com todos os `g` iguais a `init`.

        Args:
            name (str): Nome da camada (ex.: `"gate1"`).
            channels (int): Número de canais.
            init (float): Valor inicial de `g`.
            dtype (type): Tipo de ponto flutuante dos parâmetros.
        """
        self.name = name
        self.g = Tensor(
            np.full(channels, init, dtype=dtype), requires_grad=True, name=f"{name}.g"
        )

    @property
    def params(self) -> Tensor:
        """Parâmetros `g`."""
        return self.g

    @property
    def channel_count(self) -> int:
        """Número de canais."""
        return self.g.size

    def factor(self) -> np.ndarray:
        """Fatores `1 − e^{−g²}` por canal."""
        g = self.g.data
        return 1 - np.exp(-g * g)

    def values(self) -> np.ndarray:
        """Valores de porta: o próprio fator."""
        return self.factor()

    def gate_value(self, k: int) -> float:
        """Fator do canal `k`."""
        return float(self.factor()[k])

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Multiplica cada canal de `x` pelo seu fator."""
        return exp_gate(x, self.g)

    def parameters(self) -> list[Tensor]:
        """Parâmetros treináveis da camada."""
        return [self.g]

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """O formato não muda."""
        if shape[0] != self.channel_count:
            raise DimensionError("exp_gate", "C", self.channel_count, shape[0])

        return shape

    def slice_channels(self, keep: np.ndarray) -> None:
        """Mantém apenas os canais em `keep` (in-place).

        Args:
            keep (np.ndarray): Índices dos canais mantidos.
        """
        self.g = Tensor(self.g.data[keep].copy(), requires_grad=True, name=self.g.name)
