"""Módulo da rede: camadas, grafo com grupos podáveis e redes de referência."""

from __future__ import annotations


from .codec import decode, encode
from .factory import (
    BN_TESTNET_ARCH,
    LENET_ARCH,
    build_bn_testnet,
    build_lenet5_caffe,
    build_network,
)
from .graph import LayerAxis, NetworkGraph, PrunableGroup
from .protocol import Layer

__all__ = [
    "BN_TESTNET_ARCH",
    "LENET_ARCH",
    "Layer",
    "LayerAxis",
    "NetworkGraph",
    "PrunableGroup",
    "build_bn_testnet",
    "build_lenet5_caffe",
    "build_network",
    "decode",
    "encode",
]
