"""Módulo de portas multiplicativas por canal."""

from __future__ import annotations


from .impl import INITIAL_G, ExponentialGate, LinearGate
from .protocol import Gate

__all__ = [
    "INITIAL_G",
    "ExponentialGate",
    "Gate",
    "LinearGate",
]
