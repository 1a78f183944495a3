"""Modulo contendo tipos de dados que servem como modelos para o projeto."""

from __future__ import annotations


from .kinds import GateKind, LayerKind, Mode, RegularizerKind, SigmaMode
from .values import Exponent, Sigma, Strength, Threshold

__all__ = [
    "Exponent",
    "GateKind",
    "LayerKind",
    "Mode",
    "RegularizerKind",
    "Sigma",
    "SigmaMode",
    "Strength",
    "Threshold",
]
