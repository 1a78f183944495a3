"""Contagem de parâmetros e de FLOPs da rede."""

from __future__ import annotations


from slim.network import NetworkGraph
from slim.network.impl import Conv2d, Linear
from slim.pruning.selection import Selection

FLOP_CONVENTION = (
    "multiplicação-soma = 2 FLOPs; conv: 2·kh·kw·Cin·Cout·Hout·Wout; "
    "densa: 2·In·Out; demais camadas: 0"
)


def count_params(net: NetworkGraph) -> int:
    """Soma dos elementos de pesos, parâmetros de normalização e portas."""
    return sum(param.size for param in net.parameters())


def count_flops(net: NetworkGraph, input_shape: tuple[int, ...] | None = None) -> int:
    """FLOPs de um forward para uma amostra, segundo `FLOP_CONVENTION`.

    Args:
        net (NetworkGraph): A rede.
        input_shape (tuple[int, ...] | None): Formato da amostra; usa o da rede
            se `None`.

    Returns:
        int: Número de FLOPs.
    """
    total = 0
    for layer, _, out in net.output_shapes(input_shape):
        match layer:
            case Conv2d():
                cout, cin, kh, kw = layer.weight.shape
                _, ho, wo = out
                total += 2 * kh * kw * cin * cout * ho * wo

            case Linear():
                total += 2 * layer.in_features * layer.out_features

    return total


def pruning_rate(params_before: int, params_after: int) -> float:
    """Taxa de poda `1 − depois/antes`; 0 se não houver parâmetros antes."""
    if params_before <= 0:
        return 0.0

    return 1.0 - params_after / params_before


def channel_fraction_removed(selection: Selection) -> float:
    """Fração de canais removidos somando todos os grupos."""
    original = selection.original_total
    if original == 0:
        return 0.0

    return 1.0 - selection.kept_total / original
