"""Seleção de canais por limiar sobre os valores de porta."""

from __future__ import annotations


import logging
from dataclasses import dataclass, field

import numpy as np

from slim.errors import DeadLayerError
from slim.model import GateKind, Threshold
from slim.network import NetworkGraph
from slim.network.impl import Flatten

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS: dict[GateKind, float] = {
    GateKind.EXPONENTIAL: 0.0,
    GateKind.LINEAR: 1e-4,
}


def default_threshold(kind: GateKind) -> float:
    """Limiar padrão da família de porta (0 exponencial, 1e-4 linear).

    Raises:
        KeyError: Se a família não tiver portas.
    """
    return DEFAULT_THRESHOLDS[GateKind(kind)]


@dataclass(frozen=True)
class ChannelSelection:
    """Canais mantidos e removidos de um grupo."""

    group: str
    kept: np.ndarray
    removed: np.ndarray
    threshold: float

    @property
    def original(self) -> int:
        """Número de canais antes da poda."""
        return self.kept.size + self.removed.size


@dataclass(frozen=True)
class Selection:
    """Seleção de todos os grupos com porta, na ordem da rede."""

    groups: dict[str, ChannelSelection] = field(default_factory=dict)

    @property
    def signature(self) -> str:
        """Assinatura da arquitetura: canais mantidos por grupo, unidos por `-`."""
        return "-".join(str(s.kept.size) for s in self.groups.values())

    @property
    def kept_total(self) -> int:
        """Total de canais mantidos."""
        return sum(s.kept.size for s in self.groups.values())

    @property
    def original_total(self) -> int:
        """Total de canais antes da poda."""
        return sum(s.original for s in self.groups.values())


def select_channels(net: NetworkGraph, threshold: float | None = None) -> Selection:
    """Escolhe os canais mantidos: `valor de porta > limiar` (estrito).

    Com limiar 0, só portas exatamente nulas são removidas. Unidades de um grupo
    derivado (vetor achatado) cujo canal de origem foi removido também são
    removidas, pois são identicamente nulas.

    Args:
        net (NetworkGraph): Rede com portas.
        threshold (float | None): Limiar único; `None` usa o padrão de cada
            família de porta.

    Returns:
        Selection: Canais mantidos e removidos por grupo.

    Raises:
        ValueError: Se o limiar for negativo.
        DeadLayerError: Se algum grupo perder todos os canais.
    """
    if threshold is not None:
        threshold = Threshold(threshold)

    groups: dict[str, ChannelSelection] = {}
    masks: dict[str, np.ndarray] = {}
    for group in net.gated_groups():
        limit = default_threshold(group.kind) if threshold is None else float(threshold)
        mask = group.gate.values() > limit
        if group.parent is not None and group.parent in masks:
            producer = net.layer(group.producer.layer)
            if isinstance(producer, Flatten):
                source = producer.source_indices(mask.size)
                mask &= masks[group.parent][source // group.span]

        if not mask.any():
            raise DeadLayerError(group.name, limit)

        masks[group.name] = mask
        groups[group.name] = ChannelSelection(
            group=group.name,
            kept=np.flatnonzero(mask),
            removed=np.flatnonzero(~mask),
            threshold=limit,
        )
        logger.debug(
            "[PODA] Grupo %s: %d de %d canais mantidos (limiar %g)",
            group.name,
            int(mask.sum()),
            mask.size,
            limit,
        )

    return Selection(groups)
