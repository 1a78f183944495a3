"""Módulo de regularização das portas: penalidades, agendas e perda total."""

from __future__ import annotations


from .loss import TotalLoss, total_loss
from .protocol import Penalty
from .schedule import SigmaSchedule, sigma_at
from .spec import (
    RegularizerSpec,
    penalty,
    penalty_grad,
    spec_from_dict,
    spec_to_dict,
)

__all__ = [
    "Penalty",
    "RegularizerSpec",
    "SigmaSchedule",
    "TotalLoss",
    "penalty",
    "penalty_grad",
    "sigma_at",
    "spec_from_dict",
    "spec_to_dict",
    "total_loss",
]
