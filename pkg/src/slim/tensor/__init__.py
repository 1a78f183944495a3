"""Núcleo de tensores com diferenciação automática em modo reverso."""

from __future__ import annotations


from .optim import SGD, MultiStepLR, sgd_step
from .tensor import DEFAULT_DTYPE, Graph, Tensor

__all__ = [
    "DEFAULT_DTYPE",
    "SGD",
    "Graph",
    "MultiStepLR",
    "Tensor",
    "sgd_step",
]
