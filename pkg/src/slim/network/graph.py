"""Grafo de rede: lista ordenada de camadas e grupos podáveis por canal."""

from __future__ import annotations


import copy
import logging
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from slim.gating import Gate
from slim.model import GateKind, Mode
from slim.network.protocol import Layer
from slim.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayerAxis:
    """Eixo de um tensor de pesos de uma camada (0 = saídas, 1 = entradas)."""

    layer: str
    axis: int


@dataclass
class PrunableGroup:
    """Conjunto de fatias de peso ligadas aos canais controlados por uma porta.

    Podar o canal `k` remove a fatia `k` de saída do produtor, a fatia `k` das
    camadas por canal (porta, normalização em lote) e a fatia `k` de entrada de
    cada consumidor.

    Attributes:
        name (str): Nome do grupo, usado na assinatura de arquitetura.
        kind (GateKind): Família da porta.
        gate (Gate | None): Porta do grupo; `None` depois de fundida nos pesos.
        producer (LayerAxis | None): Camada cujas saídas a porta escala.
        channelwise (tuple[str, ...]): Camadas com parâmetros por canal.
        consumers (tuple[LayerAxis, ...]): Camadas cujas entradas dependem dos
            canais.
        parent (str | None): Grupo de origem quando cada unidade deriva de um
            canal de outro grupo (vetor achatado).
        span (int): Unidades por canal de origem.
    """

    name: str
    kind: GateKind
    gate: Gate | None
    producer: LayerAxis | None
    channelwise: tuple[str, ...] = ()
    consumers: tuple[LayerAxis, ...] = ()
    parent: str | None = None
    span: int = 1

    @property
    def channel_count(self) -> int:
        """Número atual de canais do grupo."""
        if self.gate is None:
            raise ValueError(f"Grupo {self.name!r} sem porta (já fundida)")

        return self.gate.channel_count


@dataclass
class NetworkGraph:
    """Rede como lista ordenada de camadas com metadados de grupos podáveis.

    Attributes:
        arch (str): Nome da arquitetura (ex.: `"lenet5_caffe"`).
        layers (list[Layer]): Camadas em ordem de execução.
        groups (list[PrunableGroup]): Grupos podáveis, em ordem.
        input_shape (tuple[int, ...]): Formato de uma amostra de entrada.
        seed (int): Semente da inicialização e do dropout.
        mode (Mode): Modo de execução.
    """

    arch: str
    layers: list[Layer]
    groups: list[PrunableGroup]
    input_shape: tuple[int, ...]
    seed: int = 0
    mode: Mode = Mode.TRAIN
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """Valida nomes únicos e que cada camada de porta pertence a um grupo.

        Raises:
            ValueError: Se houver nomes repetidos ou portas sem grupo único.
        """
        self.rng = np.random.default_rng(self.seed)
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ValueError(f"Nomes de camada repetidos: {names}")

        for layer in self.layers:
            if isinstance(layer, Gate):
                owners = [g for g in self.groups if g.gate is layer]
                if len(owners) != 1:
                    raise ValueError(
                        f"A porta {layer.name!r} pertence a {len(owners)} grupos"
                    )

    # --- Consulta ---

    def layer(self, name: str) -> Layer:
        """Retorna a camada pelo nome.

        Raises:
            KeyError: Se não existir camada com esse nome.
        """
        for layer in self.layers:
            if layer.name == name:
                return layer

        available = [layer.name for layer in self.layers]
        raise KeyError(f"Camada desconhecida: {name!r}. Disponíveis: {available}")

    def group(self, name: str) -> PrunableGroup:
        """Retorna o grupo podável pelo nome.

        Raises:
            KeyError: Se não existir grupo com esse nome.
        """
        for group in self.groups:
            if group.name == name:
                return group

        available = [group.name for group in self.groups]
        raise KeyError(f"Grupo desconhecido: {name!r}. Disponíveis: {available}")

    def gated_groups(self) -> Iterator[PrunableGroup]:
        """Grupos que ainda possuem porta."""
        return (group for group in self.groups if group.gate is not None)

    def parameters(self) -> list[Tensor]:
        """Todos os parâmetros treináveis (pesos, `γ`/`β`, portas `g`)."""
        return [param for layer in self.layers for param in layer.parameters()]

    def gate_params(self) -> list[Tensor]:
        """Parâmetros de porta (`g` exponencial ou `γ` linear) de cada grupo."""
        return [group.gate.params for group in self.gated_groups()]

    def group_channels(self) -> tuple[int, ...]:
        """Número de canais de cada grupo com porta, em ordem."""
        return tuple(group.channel_count for group in self.gated_groups())

    def output_shapes(
        self, input_shape: tuple[int, ...] | None = None
    ) -> list[tuple[Layer, tuple[int, ...], tuple[int, ...]]]:
        """Propaga formatos (sem lote) camada a camada.

        Args:
            input_shape (tuple[int, ...] | None): Formato da amostra; usa o da
                rede se `None`.

        Returns:
            list[tuple[Layer, tuple[int, ...], tuple[int, ...]]]: Para cada
                camada, o formato de entrada e o de saída.
        """
        shape = tuple(input_shape or self.input_shape)
        shapes = []
        for layer in self.layers:
            out = layer.output_shape(shape)
            shapes.append((layer, shape, out))
            shape = out

        return shapes

    # --- Execução ---

    def train(self) -> NetworkGraph:
        """Coloca a rede em modo de treino."""
        self.mode = Mode.TRAIN
        return self

    def eval(self) -> NetworkGraph:
        """Coloca a rede em modo de avaliação."""
        self.mode = Mode.EVAL
        return self

    def forward(self, x: Tensor | np.ndarray) -> Tensor:
        """Executa as camadas em ordem.

        No modo de avaliação o dropout fica desligado e a normalização em lote
        usa as estatísticas móveis.

        Args:
            x (Tensor | np.ndarray): Lote de entrada `[N, ...]`.

        Returns:
            Tensor: Os logits.
        """
        out = x if isinstance(x, Tensor) else Tensor(x)
        training = self.mode is Mode.TRAIN
        for layer in self.layers:
            out = layer.forward(out, training=training, rng=self.rng)

        return out

    def backward(self, loss: Tensor) -> None:
        """Propaga o gradiente da perda escalar para pesos e portas."""
        loss.backward()

    def zero_grad(self) -> None:
        """Descarta os gradientes de todos os parâmetros."""
        for param in self.parameters():
            param.zero_grad()

    # --- Cópias ---

    def clone(self) -> NetworkGraph:
        """Cópia profunda, preservando os apelidos internos (porta linear ↔ `γ`)."""
        return copy.deepcopy(self)

    def astype(self, dtype: type) -> NetworkGraph:
        """Cópia com todos os tensores e estatísticas convertidos para `dtype`.

        Args:
            dtype (type): Tipo de ponto flutuante (ex.: `np.float64`).

        Returns:
            NetworkGraph: A cópia convertida.
        """
        out = self.clone()
        for param in out.parameters():
            param.data = param.data.astype(dtype)
            param.grad = None

        for layer in out.layers:
            for attr in ("running_mean", "running_var"):
                if hasattr(layer, attr):
                    setattr(layer, attr, getattr(layer, attr).astype(dtype))

        return out
