"""Camadas do grafo de rede: convolução, densa, normalização em lote e auxiliares.

As camadas com pesos expõem operações de fatiamento (`slice_output`,
`slice_input`, `slice_channels`) e de escala, usadas pela compactação e pela
fusão das portas. Todas as operações de fatiamento substituem os tensores por
cópias novas.
"""

from __future__ import annotations


import math

import numpy as np

from slim.errors import DimensionError, SelectionError
from slim.model import LayerKind
from slim.tensor import DEFAULT_DTYPE, Tensor
from slim.tensor import ops


def _sliced(tensor: Tensor, keep: np.ndarray, axis: int) -> Tensor:
    data = np.take(tensor.data, keep, axis=axis).copy()
    return Tensor(data, requires_grad=tensor.requires_grad, name=tensor.name)


def kaiming_uniform(
    shape: tuple[int, ...],
    fan_in: int,
    rng: np.random.Generator,
    dtype: type = DEFAULT_DTYPE,
) -> np.ndarray:
    """Inicialização uniforme de Kaiming pelo fan-in (ganho de ReLU).

    Args:
        shape (tuple[int, ...]): Formato do tensor de pesos.
        fan_in (int): Número de entradas de cada neurônio.
        rng (np.random.Generator): Gerador semeado.
        dtype (type): Tipo de ponto flutuante.

    Returns:
        np.ndarray: Pesos em `U(−√(6/fan_in), √(6/fan_in))`.
    """
    bound = math.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Conv2d:
    """Convolução 2D sem viés."""

    layer_kind = LayerKind.CONV2D

    def __init__(
        self, name: str, weight: Tensor, *, stride: int = 1, padding: int = 0
    ) -> None:
        """Inicializa a camada com pesos já criados.

        Args:
            name (str): Nome da camada.
            weight (Tensor): Pesos `[Cout, Cin, kh, kw]`.
            stride (int): Passo da janela.
            padding (int): Preenchimento com zeros.
        """
        self.name = name
        self.weight = weight
        self.stride = stride
        self.padding = padding

    @classmethod
    def init(
        cls,
        name: str,
        in_channels: int,
        out_channels: int,
        kernel: int,
        *,
        rng: np.random.Generator,
        stride: int = 1,
        padding: int = 0,
    ) -> Conv2d:
        """Cria a camada com pesos de Kaiming semeados."""
        shape = (out_channels, in_channels, kernel, kernel)
        data = kaiming_uniform(shape, in_channels * kernel * kernel, rng)
        weight = Tensor(data, requires_grad=True, name=f"{name}.weight")
        return cls(name, weight, stride=stride, padding=padding)

    @property
    def in_channels(self) -> int:
        """Canais de entrada."""
        return self.weight.shape[1]

    @property
    def out_channels(self) -> int:
        """Canais de saída."""
        return self.weight.shape[0]

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Aplica a convolução."""
        return ops.conv2d(x, self.weight, self.stride, self.padding)

    def parameters(self) -> list[Tensor]:
        """Pesos."""
        return [self.weight]

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """`(Cout, H', W')`."""
        c, h, w = shape
        if c != self.in_channels:
            raise DimensionError(self.name, "Cin", self.in_channels, c)

        _, _, kh, kw = self.weight.shape
        ho = (h + 2 * self.padding - kh) // self.stride + 1
        wo = (w + 2 * self.padding - kw) // self.stride + 1
        return (self.out_channels, ho, wo)

    def slice_output(self, keep: np.ndarray) -> None:
        """Mantém apenas os filtros em `keep`."""
        self.weight = _sliced(self.weight, keep, axis=0)

    def slice_input(self, keep: np.ndarray) -> None:
        """Mantém apenas os canais de entrada em `keep`."""
        self.weight = _sliced(self.weight, keep, axis=1)

    def scale_output(self, factor: np.ndarray) -> None:
        """Multiplica cada filtro pelo seu fator."""
        self.weight.data *= factor.astype(self.weight.dtype).reshape(-1, 1, 1, 1)

    def scale_input(self, factor: np.ndarray) -> None:
        """Multiplica cada canal de entrada pelo seu fator."""
        self.weight.data *= factor.astype(self.weight.dtype).reshape(1, -1, 1, 1)


class Linear:
    """Camada densa sem viés."""

    layer_kind = LayerKind.LINEAR

    def __init__(self, name: str, weight: Tensor) -> None:
        """Inicializa a camada com pesos `[O, F]` já criados."""
        self.name = name
        self.weight = weight

    @classmethod
    def init(
        cls,
        name: str,
        in_features: int,
        out_features: int,
        *,
        rng: np.random.Generator,
    ) -> Linear:
        """Cria a camada com pesos de Kaiming semeados."""
        data = kaiming_uniform((out_features, in_features), in_features, rng)
        return cls(name, Tensor(data, requires_grad=True, name=f"{name}.weight"))

    @property
    def in_features(self) -> int:
        """Entradas."""
        return self.weight.shape[1]

    @property
    def out_features(self) -> int:
        """Saídas."""
        return self.weight.shape[0]

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Aplica `x · Wᵀ`."""
        return ops.linear(x, self.weight)

    def parameters(self) -> list[Tensor]:
        """Pesos."""
        return [self.weight]

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """`(O,)`."""
        if shape != (self.in_features,):
            raise DimensionError(self.name, "F", self.in_features, shape)

        return (self.out_features,)

    def slice_output(self, keep: np.ndarray) -> None:
        """Mantém apenas os neurônios em `keep`."""
        self.weight = _sliced(self.weight, keep, axis=0)

    def slice_input(self, keep: np.ndarray) -> None:
        """Mantém apenas as entradas em `keep`."""
        self.weight = _sliced(self.weight, keep, axis=1)

    def scale_output(self, factor: np.ndarray) -> None:
        """Multiplica cada linha pelo seu fator."""
        self.weight.data *= factor.astype(self.weight.dtype).reshape(-1, 1)

    def scale_input(self, factor: np.ndarray) -> None:
        """Multiplica cada coluna pelo seu fator."""
        self.weight.data *= factor.astype(self.weight.dtype).reshape(1, -1)


class BatchNorm2d:
    """Normalização em lote por canal, com estatísticas móveis."""

    layer_kind = LayerKind.BATCH_NORM

    def __init__(
        self,
        name: str,
        gamma: Tensor,
        beta: Tensor,
        running_mean: np.ndarray,
        running_var: np.ndarray,
        *,
        momentum: float = ops.BN_MOMENTUM,
        epsilon: float = ops.BN_EPSILON,
    ) -> None:
        """Inicializa a camada com parâmetros e estatísticas já criados."""
        self.name = name
        self.gamma = gamma
        self.beta = beta
        self.running_mean = running_mean
        self.running_var = running_var
        self.momentum = momentum
        self.epsilon = epsilon

    @classmethod
    def init(
        cls,
        name: str,
        channels: int,
        *,
        gamma: float = 1.0,
        dtype: type = DEFAULT_DTYPE,
    ) -> BatchNorm2d:
        """Cria a camada com `γ = gamma`, `β = 0`, média 0 e variância 1."""
        return cls(
            name,
            Tensor(
                np.full(channels, gamma, dtype=dtype),
                requires_grad=True,
                name=f"{name}.gamma",
            ),
            Tensor(
                np.zeros(channels, dtype=dtype),
                requires_grad=True,
                name=f"{name}.beta",
            ),
            np.zeros(channels, dtype=dtype),
            np.ones(channels, dtype=dtype),
        )

    @property
    def channels(self) -> int:
        """Número de canais."""
        return self.gamma.size

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Normaliza com estatísticas do lote (treino) ou móveis (avaliação)."""
        return ops.batch_norm(
            x,
            self.gamma,
            self.beta,
            self.running_mean,
            self.running_var,
            training=training,
            momentum=self.momentum,
            epsilon=self.epsilon,
        )

    def parameters(self) -> list[Tensor]:
        """`γ` e `β`."""
        return [self.gamma, self.beta]

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """O formato não muda."""
        if shape[0] != self.channels:
            raise DimensionError(self.name, "C", self.channels, shape[0])

        return shape

    def slice_channels(self, keep: np.ndarray) -> None:
        """Mantém `γ`, `β` e as estatísticas móveis dos canais em `keep`."""
        self.gamma = _sliced(self.gamma, keep, axis=0)
        self.beta = _sliced(self.beta, keep, axis=0)
        self.running_mean = self.running_mean[keep].copy()
        self.running_var = self.running_var[keep].copy()

    def absorb_input_scale(self, factor: np.ndarray) -> None:
        """Ajusta as estatísticas móveis para uma entrada dividida por `factor`.

        Com `μ' = μ/f` e `σ'² = (σ² + ε)/f² − ε`, a saída em modo de avaliação para
        a entrada `z` é idêntica à de antes para a entrada `f·z`. Exige `f > 0`.

        Args:
            factor (np.ndarray): Fator positivo por canal.
        """
        f = factor.astype(np.float64)
        mean = self.running_mean.astype(np.float64) / f
        eps = self.epsilon
        var = (self.running_var.astype(np.float64) + eps) / (f * f) - eps
        self.running_mean = mean.astype(self.running_mean.dtype)
        self.running_var = var.astype(self.running_var.dtype)


class ReLU:
    """Retificação."""

    layer_kind = LayerKind.RELU

    def __init__(self, name: str) -> None:
        """Inicializa a camada."""
        self.name = name

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """`max(x, 0)`."""
        return ops.relu(x)

    def parameters(self) -> list[Tensor]:
        """Sem parâmetros."""
        return []

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """O formato não muda."""
        return shape


class MaxPool2d:
    """Máximo espacial em janelas quadradas."""

    layer_kind = LayerKind.MAX_POOL2D

    def __init__(self, name: str, kernel: int = 2, stride: int | None = None) -> None:
        """Inicializa a camada; `stride` igual ao `kernel` se omitido."""
        self.name = name
        self.kernel = kernel
        self.stride = kernel if stride is None else stride

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Aplica o pooling."""
        return ops.max_pool2d(x, self.kernel, self.stride)

    def parameters(self) -> list[Tensor]:
        """Sem parâmetros."""
        return []

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """`(C, H', W')`."""
        c, h, w = shape
        return (
            c,
            (h - self.kernel) // self.stride + 1,
            (w - self.kernel) // self.stride + 1,
        )


class GlobalAvgPool:
    """Média espacial global por canal."""

    layer_kind = LayerKind.GLOBAL_AVG_POOL

    def __init__(self, name: str) -> None:
        """Inicializa a camada."""
        self.name = name

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """`[N, C, H, W] → [N, C]`."""
        return ops.global_avg_pool(x)

    def parameters(self) -> list[Tensor]:
        """Sem parâmetros."""
        return []

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """`(C,)`."""
        return (shape[0],)


class Flatten:
    """Achatamento com seleção opcional de unidades.

    `indices` guarda, para cada unidade de saída, a posição correspondente na
    entrada achatada; `None` significa identidade. A seleção surge quando o grupo
    podável do vetor achatado é compactado.
    """

    layer_kind = LayerKind.FLATTEN

    def __init__(self, name: str, indices: np.ndarray | None = None) -> None:
        """Inicializa a camada."""
        self.name = name
        self.indices = indices

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Achata e, se houver, seleciona as unidades mantidas."""
        out = ops.flatten(x)
        if self.indices is None:
            return out

        return ops.select(out, self.indices)

    def parameters(self) -> list[Tensor]:
        """Sem parâmetros."""
        return []

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """`(F,)`."""
        if self.indices is not None:
            return (self.indices.size,)

        return (math.prod(shape),)

    def source_indices(self, width: int) -> np.ndarray:
        """Posições na entrada achatada de cada unidade de saída.

        Args:
            width (int): Número atual de unidades de saída.

        Returns:
            np.ndarray: Uma posição por unidade.
        """
        if self.indices is None:
            return np.arange(width)

        return self.indices

    def compact(
        self,
        keep: np.ndarray,
        *,
        width: int,
        parent_keep: np.ndarray,
        parent_count: int,
        span: int,
    ) -> None:
        """Mantém as unidades `keep` e reindexa após a poda do grupo de origem.

        Cada canal de origem ocupa `span` posições consecutivas da entrada achatada.
        As unidades mantidas devem vir de canais de origem mantidos.

        Args:
            keep (np.ndarray): Unidades de saída mantidas.
            width (int): Número atual de unidades de saída.
            parent_keep (np.ndarray): Canais mantidos no grupo de origem (ordenados).
            parent_count (int): Número atual de canais do grupo de origem.
            span (int): Posições por canal de origem.

        Raises:
            SelectionError: Se alguma unidade mantida vier de canal removido.
        """
        source = self.source_indices(width)[keep]
        channel, offset = np.divmod(source, span)
        position = np.full(parent_count, -1, dtype=np.int64)
        position[parent_keep] = np.arange(parent_keep.size)
        if (position[channel] < 0).any():
            raise SelectionError(
                self.name, "unidade mantida depende de canal de origem removido"
            )

        self.indices = (position[channel] * span + offset).astype(np.int64)


class Dropout:
    """Dropout invertido, ativo apenas no modo de treino."""

    layer_kind = LayerKind.DROPOUT

    def __init__(self, name: str, rate: float) -> None:
        """Inicializa a camada."""
        self.name = name
        self.rate = rate

    def forward(
        self,
        x: Tensor,
        *,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Zera elementos com probabilidade `rate` no treino."""
        if training and rng is None:
            raise ValueError(f"{self.name}: dropout em treino exige um gerador")

        return ops.dropout(
            x, self.rate, training=training, rng=rng or np.random.default_rng(0)
        )

    def parameters(self) -> list[Tensor]:
        """Sem parâmetros."""
        return []

    def output_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        """O formato não muda."""
        return shape
