"""Relatório de poda: canais mantidos, assinatura, parâmetros e FLOPs."""

from __future__ import annotations


import json
from dataclasses import dataclass, field
from typing import TypedDict

from slim.model import GateKind
from slim.network import NetworkGraph
from slim.pruning.accounting import (
    FLOP_CONVENTION,
    count_flops,
    count_params,
    pruning_rate,
)
from slim.pruning.compaction import merge_gates
from slim.pruning.selection import Selection


class GroupPayload(TypedDict):
    """Payload JSON de um grupo podado."""

    name: str
    original: int
    kept: list[int]


class ReportPayload(TypedDict):
    """Payload JSON de um relatório de poda."""

    gate_kind: str
    threshold: float
    signature: str
    groups: list[GroupPayload]
    params_before: int
    params_after: int
    flops_before: int
    flops_after: int
    pruning_rate: float
    flop_convention: str


@dataclass(frozen=True)
class GroupReport:
    """Canais mantidos de um grupo."""

    name: str
    original: int
    kept: tuple[int, ...]

    @property
    def removed(self) -> tuple[int, ...]:
        """Canais removidos, em ordem."""
        kept = set(self.kept)
        return tuple(k for k in range(self.original) if k not in kept)


@dataclass(frozen=True)
class PruneReport:
    """Resultado de uma poda.

    A assinatura é a sequência de canais mantidos por grupo, unida por `-`
    (ex.: `"9-17-43-25"`).
    """

    gate_kind: GateKind
    threshold: float
    groups: tuple[GroupReport, ...]
    params_before: int
    params_after: int
    flops_before: int
    flops_after: int
    flop_convention: str = field(default=FLOP_CONVENTION)

    @property
    def signature(self) -> str:
        """Assinatura da arquitetura podada."""
        return "-".join(str(len(group.kept)) for group in self.groups)

    @property
    def pruning_rate(self) -> float:
        """`1 − params_after/params_before`."""
        return pruning_rate(self.params_before, self.params_after)

    def encode(self) -> bytes:
        """Serializa o relatório para bytes JSON.

        Returns:
            bytes: O relatório serializado em JSON.
        """
        payload: ReportPayload = {
            "gate_kind": self.gate_kind,
            "threshold": self.threshold,
            "signature": self.signature,
            "groups": [
                {"name": g.name, "original": g.original, "kept": list(g.kept)}
                for g in self.groups
            ],
            "params_before": self.params_before,
            "params_after": self.params_after,
            "flops_before": self.flops_before,
            "flops_after": self.flops_after,
            "pruning_rate": self.pruning_rate,
            "flop_convention": self.flop_convention,
        }
        return json.dumps(payload, indent=2).encode()

    @staticmethod
    def decode(raw: bytes) -> PruneReport:
        """Desserializa um relatório a partir de bytes JSON.

        Args:
            raw (bytes): Bytes JSON do relatório.

        Returns:
            PruneReport: O relatório desserializado.

        Raises:
            ValueError: Se a assinatura gravada não conferir com os grupos.
        """
        payload: ReportPayload = json.loads(raw)
        report = PruneReport(
            gate_kind=GateKind(payload["gate_kind"]),
            threshold=payload["threshold"],
            groups=tuple(
                GroupReport(g["name"], g["original"], tuple(g["kept"]))
                for g in payload["groups"]
            ),
            params_before=payload["params_before"],
            params_after=payload["params_after"],
            flops_before=payload["flops_before"],
            flops_after=payload["flops_after"],
            flop_convention=payload["flop_convention"],
        )
        if report.signature != payload["signature"]:
            raise ValueError(
                f"Assinatura inconsistente: {payload['signature']!r} "
                f"gravada, {report.signature!r} pelos grupos"
            )

        return report


def build_report(
    before: NetworkGraph, after: NetworkGraph, selection: Selection
) -> PruneReport:
    """Monta o relatório comparando a rede original com a podada.

    Os parâmetros de antes são contados com as portas já fundidas, de modo que
    manter todos os canais resulta em taxa de poda 0.

    Args:
        before (NetworkGraph): Rede antes da poda.
        after (NetworkGraph): Rede compactada e com portas fundidas.
        selection (Selection): Seleção aplicada.

    Returns:
        PruneReport: O relatório.
    """
    kinds = [group.kind for group in before.gated_groups()]
    choices = list(selection.groups.values())
    return PruneReport(
        gate_kind=kinds[0] if kinds else GateKind.NONE,
        threshold=choices[0].threshold if choices else 0.0,
        groups=tuple(
            GroupReport(c.group, c.original, tuple(int(k) for k in c.kept))
            for c in choices
        ),
        params_before=count_params(merge_gates(before)),
        params_after=count_params(after),
        flops_before=count_flops(before),
        flops_after=count_flops(after),
    )
