"""Fábrica das redes de referência.

Define as larguras padrão e monta a LeNet5-Caffe (sem normalização em lote) e
uma CNN pequena com normalização em lote, usada para estudar a interação entre
portas e estatísticas móveis.
"""

from __future__ import annotations


import logging
from collections.abc import Callable

import numpy as np

from slim.gating import INITIAL_G, ExponentialGate, Gate, LinearGate
from slim.model import GateKind
from slim.network.graph import LayerAxis, NetworkGraph, PrunableGroup
from slim.network.impl import (
    BatchNorm2d,
    Conv2d,
    Flatten,
    GlobalAvgPool,
    Linear,
    MaxPool2d,
    ReLU,
)
from slim.network.protocol import Layer

logger = logging.getLogger(__name__)

# --- LeNet5-Caffe ---
LENET_ARCH = "lenet5_caffe"
LENET_WIDTHS: tuple[int, int, int] = (20, 50, 500)
LENET_KERNEL = 5
MNIST_SHAPE: tuple[int, int, int] = (1, 28, 28)
NUM_CLASSES = 10

# --- CNN de teste com normalização em lote ---
BN_TESTNET_ARCH = "bn_testnet"
BN_TESTNET_WIDTHS: tuple[int, int, int] = (8, 16, 16)
BN_KERNEL = 3

# γ inicial da normalização em lote quando ela serve de porta linear.
LINEAR_GATE_GAMMA = 0.5


def build_lenet5_caffe(
    gate_kind: GateKind = GateKind.EXPONENTIAL,
    *,
    widths: tuple[int, int, int] = LENET_WIDTHS,
    seed: int = 0,
    num_classes: int = NUM_CLASSES,
    input_shape: tuple[int, int, int] = MNIST_SHAPE,
) -> NetworkGraph:
    """Monta a LeNet5-Caffe com portas por canal.

    Ordem das camadas: `conv1 → gate1 → pool1 → conv2 → gate2 → pool2 →
    flatten → gate3 → fc1 → gate4 → relu → fc2`, sem vieses e sem normalização
    em lote. Os quatro grupos podáveis são `conv1`, `conv2`, `flatten` e `fc1`;
    com as larguras padrão, seus canais são `(20, 50, 800, 500)`.

    Args:
        gate_kind (GateKind): `exponential` (com portas) ou `none` (sem portas).
        widths (tuple[int, int, int]): Filtros de conv1 e conv2 e neurônios de fc1.
        seed (int): Semente da inicialização.
        num_classes (int): Número de classes da saída.
        input_shape (tuple[int, int, int]): Formato de uma imagem de entrada.

    Returns:
        NetworkGraph: A rede montada, em modo de treino.

    Raises:
        ValueError: Se `gate_kind` for `linear` (a arquitetura não tem
            normalização em lote).
    """
    gate_kind = GateKind(gate_kind)
    if gate_kind is GateKind.LINEAR:
        raise ValueError(
            "A LeNet5-Caffe não tem normalização em lote para portas lineares"
        )

    c1, c2, hidden = widths
    rng = np.random.default_rng(seed)
    conv1 = Conv2d.init("conv1", input_shape[0], c1, LENET_KERNEL, rng=rng)
    conv2 = Conv2d.init("conv2", c1, c2, LENET_KERNEL, rng=rng)
    pool1, pool2 = MaxPool2d("pool1"), MaxPool2d("pool2")
    flatten = Flatten("flatten")

    shape = tuple(input_shape)
    for layer in (conv1, pool1, conv2, pool2):
        shape = layer.output_shape(shape)

    _, h, w = shape
    span = h * w
    features = c2 * span
    fc1 = Linear.init("fc1", features, hidden, rng=rng)
    fc2 = Linear.init("fc2", hidden, num_classes, rng=rng)

    gated = gate_kind is GateKind.EXPONENTIAL
    gates = {
        name: ExponentialGate(name, channels)
        for name, channels in (
            ("gate1", c1),
            ("gate2", c2),
            ("gate3", features),
            ("gate4", hidden),
        )
    }

    def _gate(name: str) -> list[Layer]:
        return [gates[name]] if gated else []

    layers: list[Layer] = [
        conv1,
        *_gate("gate1"),
        pool1,
        conv2,
        *_gate("gate2"),
        pool2,
        flatten,
        *_gate("gate3"),
        fc1,
        *_gate("gate4"),
        ReLU("relu"),
        fc2,
    ]

    groups: list[PrunableGroup] = []
    if gated:
        groups = [
            PrunableGroup(
                "conv1",
                GateKind.EXPONENTIAL,
                gates["gate1"],
                LayerAxis("conv1", 0),
                ("gate1",),
                (LayerAxis("conv2", 1),),
            ),
            PrunableGroup(
                "conv2",
                GateKind.EXPONENTIAL,
                gates["gate2"],
                LayerAxis("conv2", 0),
                ("gate2",),
            ),
            PrunableGroup(
                "flatten",
                GateKind.EXPONENTIAL,
                gates["gate3"],
                LayerAxis("flatten", 0),
                ("gate3",),
                (LayerAxis("fc1", 1),),
                parent="conv2",
                span=span,
            ),
            PrunableGroup(
                "fc1",
                GateKind.EXPONENTIAL,
                gates["gate4"],
                LayerAxis("fc1", 0),
                ("gate4",),
                (LayerAxis("fc2", 1),),
            ),
        ]

    net = NetworkGraph(LENET_ARCH, layers, groups, tuple(input_shape), seed=seed)
    logger.debug(
        "[REDE] %s montada: portas=%s larguras=%s", LENET_ARCH, gate_kind, widths
    )
    return net


def build_bn_testnet(
    gate_kind: GateKind = GateKind.EXPONENTIAL,
    *,
    widths: tuple[int, int, int] = BN_TESTNET_WIDTHS,
    seed: int = 0,
    num_classes: int = NUM_CLASSES,
    input_shape: tuple[int, int, int] = MNIST_SHAPE,
) -> NetworkGraph:
    """Monta uma CNN de três blocos `conv → porta → BN → ReLU`.

    Há max-pooling após os blocos 1 e 2, média global e uma camada densa na
    saída. Com porta `linear` a camada de porta não existe: o grupo usa o `γ`
    da normalização (iniciado em 0.5). Com porta `exponential`, `g = 1` e
    `γ = 1`.

    Args:
        gate_kind (GateKind): `exponential` ou `linear`.
        widths (tuple[int, int, int]): Filtros de cada bloco.
        seed (int): Semente da inicialização.
        num_classes (int): Número de classes da saída.
        input_shape (tuple[int, int, int]): Formato de uma imagem de entrada.

    Returns:
        NetworkGraph: A rede montada, em modo de treino.

    Raises:
        ValueError: Se `gate_kind` for `none`.
    """
    gate_kind = GateKind(gate_kind)
    if gate_kind is GateKind.NONE:
        raise ValueError("A CNN de teste exige portas exponenciais ou lineares")

    rng = np.random.default_rng(seed)
    gamma = LINEAR_GATE_GAMMA if gate_kind is GateKind.LINEAR else 1.0
    layers: list[Layer] = []
    groups: list[PrunableGroup] = []
    in_channels = input_shape[0]

    for index, channels in enumerate(widths, start=1):
        conv = Conv2d.init(
            f"conv{index}", in_channels, channels, BN_KERNEL, rng=rng, padding=1
        )
        bn = BatchNorm2d.init(f"bn{index}", channels, gamma=gamma)
        gate: Gate
        if gate_kind is GateKind.EXPONENTIAL:
            gate = ExponentialGate(f"gate{index}", channels, init=INITIAL_G)
            layers += [conv, gate, bn]
            channelwise = (gate.name, bn.name)

        else:
            gate = LinearGate(bn)
            layers += [conv, bn]
            channelwise = (bn.name,)

        layers.append(ReLU(f"relu{index}"))
        if index < len(widths):
            layers.append(MaxPool2d(f"pool{index}"))

        consumer = f"conv{index + 1}" if index < len(widths) else "fc"
        groups.append(
            PrunableGroup(
                f"block{index}",
                gate_kind,
                gate,
                LayerAxis(conv.name, 0),
                channelwise,
                (LayerAxis(consumer, 1),),
            )
        )
        in_channels = channels

    layers += [
        GlobalAvgPool("gap"),
        Linear.init("fc", in_channels, num_classes, rng=rng),
    ]
    net = NetworkGraph(BN_TESTNET_ARCH, layers, groups, tuple(input_shape), seed=seed)
    logger.debug(
        "[REDE] %s montada: portas=%s larguras=%s", BN_TESTNET_ARCH, gate_kind, widths
    )
    return net


ARCH_REGISTRY: dict[str, Callable[..., NetworkGraph]] = {
    LENET_ARCH: build_lenet5_caffe,
    BN_TESTNET_ARCH: build_bn_testnet,
}


def build_network(arch: str, gate_kind: GateKind, *, seed: int = 0) -> NetworkGraph:
    """Monta a arquitetura registrada com o nome informado.

    Args:
        arch (str): Nome da arquitetura (ex.: `LENET_ARCH`).
        gate_kind (GateKind): Tipo de porta.
        seed (int): Semente da inicialização.

    Returns:
        NetworkGraph: A rede montada.

    Raises:
        KeyError: Se `arch` não estiver registrada.
    """
    if arch not in ARCH_REGISTRY:
        available = list(ARCH_REGISTRY)
        raise KeyError(f"Arquitetura desconhecida: {arch!r}. Disponíveis: {available}")

    return ARCH_REGISTRY[arch](gate_kind, seed=seed)
