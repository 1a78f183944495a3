"""Implementações das portas por canal."""

from __future__ import annotations


from .exponential import INITIAL_G, ExponentialGate
from .linear import LinearGate

__all__ = [
    "INITIAL_G",
    "ExponentialGate",
    "LinearGate",
]
