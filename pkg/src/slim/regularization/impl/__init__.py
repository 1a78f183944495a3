"""Implementações das penalidades."""

from __future__ import annotations


from .penalties import PENALTIES, BoundedL1Penalty, L1Penalty, L2Penalty

__all__ = [
    "PENALTIES",
    "BoundedL1Penalty",
    "L1Penalty",
    "L2Penalty",
]
