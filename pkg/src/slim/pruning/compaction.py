"""Compactação física da rede e fusão das portas nos pesos."""

from __future__ import annotations


import logging
from typing import cast

import numpy as np

from slim.errors import DimensionError, SelectionError
from slim.gating import ExponentialGate
from slim.model import GateKind
from slim.network import NetworkGraph, PrunableGroup
from slim.network.impl import BatchNorm2d, Conv2d, Flatten, Linear
from slim.pruning.selection import ChannelSelection, Selection

logger = logging.getLogger(__name__)


def _validated_keep(
    group: PrunableGroup, count: int, choice: ChannelSelection | None
) -> np.ndarray:
    if choice is None:
        return np.arange(count)

    if choice.original != count:
        raise SelectionError(
            group.name, f"seleção para {choice.original} canais, grupo tem {count}"
        )

    keep = np.asarray(choice.kept, dtype=np.int64)
    if keep.size == 0:
        raise SelectionError(group.name, "nenhum canal mantido")

    if keep.min() < 0 or keep.max() >= count or np.any(np.diff(keep) <= 0):
        raise SelectionError(group.name, "índices fora do intervalo ou fora de ordem")

    return keep


def compact(net: NetworkGraph, selection: Selection) -> NetworkGraph:
    """Remove fisicamente os canais não selecionados.

    Para cada grupo: o produtor perde as fatias de saída, as camadas por canal
    (porta, normalização em lote e estatísticas móveis) são fatiadas e cada
    consumidor perde as fatias de entrada. As portas permanecem, já fatiadas,
    até a fusão. Grupos ausentes da seleção mantêm todos os canais.

    Args:
        net (NetworkGraph): Rede original (não é modificada).
        selection (Selection): Resultado de `select_channels`.

    Returns:
        NetworkGraph: Uma nova rede, mais estreita.

    Raises:
        SelectionError: Se a seleção não for compatível com os formatos atuais.
    """
    out = net.clone()
    unknown = set(selection.groups) - {g.name for g in out.gated_groups()}
    if unknown:
        raise SelectionError(sorted(unknown)[0], "grupo inexistente ou sem porta")

    counts = {group.name: group.channel_count for group in out.gated_groups()}
    kept: dict[str, np.ndarray] = {}
    for group in out.gated_groups():
        choice = selection.groups.get(group.name)
        keep = _validated_keep(group, counts[group.name], choice)
        kept[group.name] = keep

        producer = out.layer(group.producer.layer)
        if isinstance(producer, Flatten):
            parent = group.parent
            if parent is None or parent not in counts:
                raise SelectionError(group.name, "grupo achatado sem grupo de origem")

            producer.compact(
                keep,
                width=counts[group.name],
                parent_keep=kept[parent],
                parent_count=counts[parent],
                span=group.span,
            )

        else:
            producer.slice_output(keep)

        for name in group.channelwise:
            out.layer(name).slice_channels(keep)

        for consumer in group.consumers:
            out.layer(consumer.layer).slice_input(keep)

    try:
        out.output_shapes()

    except DimensionError as exc:
        raise SelectionError(exc.op, str(exc)) from exc

    logger.debug("[PODA] Rede compactada: canais %s", out.group_channels())
    return out


def _merge_group(out: NetworkGraph, group: PrunableGroup) -> None:
    gate = cast(ExponentialGate, group.gate)
    factor = gate.factor().astype(np.float64)
    producer = out.layer(group.producer.layer)
    bn = next(
        (
            layer
            for name in group.channelwise
            if isinstance(layer := out.layer(name), BatchNorm2d)
        ),
        None,
    )

    if bn is not None:
        # Canal nulo: zera o filtro; demais: escala absorvida pelas estatísticas.
        positive = factor > 0.0
        bn.absorb_input_scale(np.where(positive, factor, 1.0))
        producer.scale_output(positive.astype(np.float64))

    elif isinstance(producer, (Conv2d, Linear)):
        producer.scale_output(factor)

    else:
        for consumer in group.consumers:
            out.layer(consumer.layer).scale_input(factor)

    out.layers = [layer for layer in out.layers if layer is not gate]
    group.channelwise = tuple(name for name in group.channelwise if name != gate.name)
    group.gate = None


def merge_gates(net: NetworkGraph) -> NetworkGraph:
    """Funde cada porta exponencial nos pesos e remove as camadas de porta.

    Sem normalização em lote, o fator do canal `k` multiplica a fatia `k` de
    saída do produtor (ou, para o vetor achatado, a fatia `k` de entrada do
    consumidor). Com normalização em lote logo após a porta, o fator é
    absorvido pelas estatísticas móveis e canais de fator zero têm o filtro
    zerado. Em ambos os casos a saída em modo de avaliação não muda. Portas
    lineares já são o `γ` da normalização e ficam como estão.

    Args:
        net (NetworkGraph): Rede, em geral já compactada (não é modificada).

    Returns:
        NetworkGraph: Nova rede sem camadas de porta exponencial.
    """
    out = net.clone()
    for group in out.groups:
        if group.gate is None or group.kind is not GateKind.EXPONENTIAL:
            continue

        _merge_group(out, group)

    logger.debug("[PODA] Portas fundidas: %d camadas restantes", len(out.layers))
    return out
