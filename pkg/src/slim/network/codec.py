"""Serialização do grafo de rede em descritor JSON mais tensores nomeados.

O descritor guarda a estrutura (camadas, grupos, formato de entrada); os
tensores (pesos, portas, `γ`/`β` e estatísticas móveis) ficam num dicionário
`nome → array`, gravado pelo checkpoint como blobs binários.
"""

from __future__ import annotations


from typing import NotRequired, TypedDict

import numpy as np

from slim.gating import ExponentialGate, Gate, LinearGate
from slim.model import GateKind, LayerKind, Mode
from slim.network.graph import LayerAxis, NetworkGraph, PrunableGroup
from slim.network.impl import (
    BatchNorm2d,
    Conv2d,
    Dropout,
    Flatten,
    GlobalAvgPool,
    Linear,
    MaxPool2d,
    ReLU,
)
from slim.network.protocol import Layer
from slim.tensor import Tensor


class LayerPayload(TypedDict):
    """Descritor de uma camada."""

    kind: str
    name: str
    stride: NotRequired[int]
    padding: NotRequired[int]
    kernel: NotRequired[int]
    momentum: NotRequired[float]
    epsilon: NotRequired[float]
    rate: NotRequired[float]
    indices: NotRequired[list[int] | None]


class GroupPayload(TypedDict):
    """Descritor de um grupo podável."""

    name: str
    kind: str
    gate: str | None
    producer: tuple[str, int] | None
    channelwise: list[str]
    consumers: list[tuple[str, int]]
    parent: str | None
    span: int


class GraphPayload(TypedDict):
    """Descritor completo da rede."""

    arch: str
    input_shape: list[int]
    seed: int
    mode: str
    layers: list[LayerPayload]
    groups: list[GroupPayload]


def _encode_layer(layer: Layer, tensors: dict[str, np.ndarray]) -> LayerPayload:
    payload: LayerPayload = {"kind": layer.layer_kind, "name": layer.name}
    match layer:
        case Conv2d():
            tensors[f"{layer.name}.weight"] = layer.weight.data
            payload["stride"] = layer.stride
            payload["padding"] = layer.padding

        case Linear():
            tensors[f"{layer.name}.weight"] = layer.weight.data

        case BatchNorm2d():
            tensors[f"{layer.name}.gamma"] = layer.gamma.data
            tensors[f"{layer.name}.beta"] = layer.beta.data
            tensors[f"{layer.name}.running_mean"] = layer.running_mean
            tensors[f"{layer.name}.running_var"] = layer.running_var
            payload["momentum"] = layer.momentum
            payload["epsilon"] = layer.epsilon

        case ExponentialGate():
            tensors[f"{layer.name}.g"] = layer.g.data

        case MaxPool2d():
            payload["kernel"] = layer.kernel
            payload["stride"] = layer.stride

        case Flatten():
            indices = layer.indices
            payload["indices"] = None if indices is None else indices.tolist()

        case Dropout():
            payload["rate"] = layer.rate

    return payload


def encode(net: NetworkGraph) -> tuple[GraphPayload, dict[str, np.ndarray]]:
    """Separa a rede em descritor serializável e tensores nomeados.

    Args:
        net (NetworkGraph): A rede.

    Returns:
        tuple[GraphPayload, dict[str, np.ndarray]]: O descritor e os tensores.
    """
    tensors: dict[str, np.ndarray] = {}
    layers = [_encode_layer(layer, tensors) for layer in net.layers]
    groups: list[GroupPayload] = []
    for group in net.groups:
        gate_name = None
        if isinstance(group.gate, LinearGate):
            gate_name = group.gate.bn.name

        elif group.gate is not None:
            gate_name = group.gate.name

        groups.append(
            {
                "name": group.name,
                "kind": group.kind,
                "gate": gate_name,
                "producer": (
                    None
                    if group.producer is None
                    else (group.producer.layer, group.producer.axis)
                ),
                "channelwise": list(group.channelwise),
                "consumers": [(c.layer, c.axis) for c in group.consumers],
                "parent": group.parent,
                "span": group.span,
            }
        )

    payload: GraphPayload = {
        "arch": net.arch,
        "input_shape": list(net.input_shape),
        "seed": net.seed,
        "mode": net.mode,
        "layers": layers,
        "groups": groups,
    }
    return payload, tensors


def _param(tensors: dict[str, np.ndarray], name: str) -> Tensor:
    if name not in tensors:
        raise ValueError(f"Tensor ausente no checkpoint: {name!r}")

    return Tensor(tensors[name].copy(), requires_grad=True, name=name)


def _decode_layer(payload: LayerPayload, tensors: dict[str, np.ndarray]) -> Layer:
    name = payload["name"]
    match payload["kind"]:
        case LayerKind.CONV2D:
            return Conv2d(
                name,
                _param(tensors, f"{name}.weight"),
                stride=payload.get("stride", 1),
                padding=payload.get("padding", 0),
            )

        case LayerKind.LINEAR:
            return Linear(name, _param(tensors, f"{name}.weight"))

        case LayerKind.BATCH_NORM:
            return BatchNorm2d(
                name,
                _param(tensors, f"{name}.gamma"),
                _param(tensors, f"{name}.beta"),
                tensors[f"{name}.running_mean"].copy(),
                tensors[f"{name}.running_var"].copy(),
                momentum=payload["momentum"],
                epsilon=payload["epsilon"],
            )

        case LayerKind.EXP_GATE:
            g = _param(tensors, f"{name}.g")
            gate = ExponentialGate(name, g.size, dtype=g.data.dtype.type)
            gate.g = g
            return gate

        case LayerKind.RELU:
            return ReLU(name)

        case LayerKind.MAX_POOL2D:
            return MaxPool2d(name, payload["kernel"], payload["stride"])

        case LayerKind.GLOBAL_AVG_POOL:
            return GlobalAvgPool(name)

        case LayerKind.FLATTEN:
            indices = payload.get("indices")
            return Flatten(
                name, None if indices is None else np.asarray(indices, dtype=np.int64)
            )

        case LayerKind.DROPOUT:
            return Dropout(name, payload["rate"])

        case _:
            raise ValueError(f"Tipo de camada desconhecido: {payload['kind']!r}")


def decode(payload: GraphPayload, tensors: dict[str, np.ndarray]) -> NetworkGraph:
    """Reconstrói a rede a partir do descritor e dos tensores.

    Args:
        payload (GraphPayload): Descritor produzido por `encode`.
        tensors (dict[str, np.ndarray]): Tensores nomeados.

    Returns:
        NetworkGraph: A rede reconstruída, no modo registrado.

    Raises:
        ValueError: Se o descritor citar camada, tipo ou tensor desconhecido.
    """
    layers = [_decode_layer(layer, tensors) for layer in payload["layers"]]
    by_name = {layer.name: layer for layer in layers}
    groups: list[PrunableGroup] = []
    for group in payload["groups"]:
        kind = GateKind(group["kind"])
        gate: Gate | None = None
        if group["gate"] is not None:
            target = by_name.get(group["gate"])
            if target is None:
                raise ValueError(f"Porta desconhecida no grupo {group['name']!r}")

            gate = LinearGate(target) if kind is GateKind.LINEAR else target

        producer = group["producer"]
        groups.append(
            PrunableGroup(
                name=group["name"],
                kind=kind,
                gate=gate,
                producer=None if producer is None else LayerAxis(*producer),
                channelwise=tuple(group["channelwise"]),
                consumers=tuple(LayerAxis(*c) for c in group["consumers"]),
                parent=group["parent"],
                span=group["span"],
            )
        )

    return NetworkGraph(
        payload["arch"],
        layers,
        groups,
        tuple(payload["input_shape"]),
        seed=payload["seed"],
        mode=Mode(payload["mode"]),
    )
